"""Published result tables shipped as data, and their consistency checks.

Each table is a CSV in ``data/`` keeping the printed cell text; the
parsers here turn cells into numbers.  ``data/tables.yaml`` describes
every table and lists the cross-table relations that should hold plus the
conflicts already known to break them.  :func:`check_fixtures` recomputes
all relations and compares the disagreements it finds with that list.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np
import yaml

from ..fab import STANDARD_SPHERE_REFERENCE, faraday_thickness
from ..fom import FrequencyResponse, reflection, resonances
from ..geometry.specs import CoaxModel, GeometryError, spec_from_dict
from .runner import ResultRow, select_best, trend_check

RESULT_COLUMNS = ["label", "printed_label", "value_mm", "source", "s11", "zin",
                  "bandwidth_pct", "gain_db"]
_S11 = re.compile(r"^\s*(-?[\d.]+)\s*dB\s*(?:at|@)\s*([\d.]+)\s*$")
_ZIN = re.compile(r"^\s*([+-]?[\d.]+)\s*([+-])\s*([\d.]*)\s*[ij]\s*$")


class FixtureError(ValueError):
    """Malformed fixture file or notes."""


def parse_s11(text: str):
    """``"-11dB at 1.3"`` -> ``(-11.0, 1.3)``; blank -> ``(None, None)``."""
    if not text or not text.strip():
        return None, None
    m = _S11.match(text)
    if not m:
        raise FixtureError(f"unreadable S11 cell {text!r}")
    return float(m.group(1)), float(m.group(2))


def parse_zin(text: str):
    """Complex impedance from cells like ``"49.5+.1j"`` or ``"56.3-10i"``.

    Returns None when the cell does not hold a single ``a +/- bj`` value.
    """
    m = _ZIN.match(text or "")
    if not m:
        return None
    im = float(m.group(3)) if m.group(3) else 1.0
    return complex(float(m.group(1)), im if m.group(2) == "+" else -im)


def _num(text):
    text = (text or "").strip()
    if not text or text.upper() == "N/A":
        return None
    return float(text)


@dataclass(frozen=True)
class PublishedRow:
    label: str
    printed_label: str
    value_mm: float | None
    source: str
    s11_db: float | None
    resonance_ghz: float | None
    zin: complex | None
    zin_text: str
    bandwidth_pct: float | None
    gain_db: float | None

    def as_result_row(self) -> ResultRow:
        return ResultRow(
            value=self.value_mm, label=self.label,
            resonance_ghz=self.resonance_ghz, s11_db=self.s11_db,
            zin=self.zin, bandwidth_pct=self.bandwidth_pct,
            resonant=self.bandwidth_pct is not None, gain_dbi=self.gain_db)


@dataclass(frozen=True)
class PublishedTable:
    name: str
    meta: dict
    columns: tuple
    records: tuple            # raw dict rows
    rows: tuple = ()          # PublishedRow for result tables

    def row(self, label: str) -> PublishedRow:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(f"{self.name}: no row labelled {label!r}")

    def result_rows(self, swept_only: bool = True) -> list[ResultRow]:
        return [r.as_result_row() for r in self.rows
                if not swept_only or r.value_mm is not None]


def _data(name: str) -> str:
    return resources.files(__package__).joinpath("data", name).read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def notes() -> dict:
    return yaml.safe_load(_data("tables.yaml"))


def table_names() -> list[str]:
    return list(notes()["tables"])


def load_table(name: str) -> PublishedTable:
    meta = notes()["tables"].get(name)
    if meta is None:
        raise KeyError(f"unknown fixture table {name!r}")
    reader = csv.DictReader(io.StringIO(_data(f"{name}.csv")))
    records = tuple(reader)
    cols = tuple(reader.fieldnames or ())
    rows = ()
    if meta["kind"] in ("results", "sweep"):
        if list(cols) != RESULT_COLUMNS:
            raise FixtureError(f"{name}: header {cols} differs from {RESULT_COLUMNS}")
        out = []
        for rec in records:
            s11, f = parse_s11(rec["s11"])
            out.append(PublishedRow(
                label=rec["label"], printed_label=rec["printed_label"],
                value_mm=_num(rec["value_mm"]), source=rec["source"],
                s11_db=s11, resonance_ghz=f, zin=parse_zin(rec["zin"]),
                zin_text=rec["zin"], bandwidth_pct=_num(rec["bandwidth_pct"]),
                gain_db=_num(rec["gain_db"])))
        rows = tuple(out)
    return PublishedTable(name, meta, cols, records, rows)


# ----------------------------------------------------------------------------
# consistency checks
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Finding:
    """One detected disagreement; ``known`` when listed in the notes."""

    id: str
    detail: str
    known: bool


@dataclass
class FixtureReport:
    findings: list = field(default_factory=list)
    missing: list = field(default_factory=list)       # documented, not detected
    expectations: list = field(default_factory=list)  # (name, ok, detail)
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (not self.errors and not self.missing
                and all(f.known for f in self.findings)
                and all(ok for _, ok, _ in self.expectations))

    def lines(self) -> list[str]:
        out = [f"ERROR {e}" for e in self.errors]
        for f in self.findings:
            out.append(f"{'flagged' if f.known else 'UNDOCUMENTED'} {f.id}: {f.detail}")
        for m in self.missing:
            out.append(f"MISSING documented conflict {m} was not detected")
        for name, ok, detail in self.expectations:
            out.append(f"{'pass' if ok else 'FAIL'} {name}: {detail}")
        out.append(f"fixtures {'OK' if self.ok else 'FAILED'}: {len(self.findings)} flagged, "
                   f"{sum(ok for _, ok, _ in self.expectations)}/{len(self.expectations)} "
                   "expectations hold")
        return out


def _ref(tables, ref: str) -> PublishedRow:
    name, label = ref.split(":", 1)
    return tables[name].row(label)


def _field(row: PublishedRow, name: str):
    return {"s11": row.s11_db, "resonance": row.resonance_ghz, "zin": row.zin,
            "bandwidth": row.bandwidth_pct, "gain": row.gain_db}[name]


def _same_design(tables, group, tol) -> list[tuple[str, str]]:
    out = []
    rows = [(ref, _ref(tables, ref)) for ref in group["rows"]]
    for fld in ("s11", "resonance", "zin", "bandwidth", "gain"):
        vals = [(ref, _field(r, fld)) for ref, r in rows if _field(r, fld) is not None]
        if len(vals) < 2:
            continue
        spread = max(abs(a - b) for _, a in vals for _, b in vals)
        if spread > tol[fld]:
            text = ", ".join(f"{ref}={v:g}" for ref, v in vals)
            out.append((f"{group['id']}.{fld}", text))
    return out


def _s11_vs_zin(tables, tol) -> list[tuple[str, str]]:
    out = []
    for t in tables.values():
        for r in t.rows:
            if r.s11_db is None or r.zin is None:
                continue
            g_table = 10 ** (r.s11_db / 20)
            g_zin = float(abs(reflection(r.zin)))
            if abs(g_table - g_zin) > tol:
                out.append((f"s11_zin:{t.name}:{r.label}",
                            f"|Gamma| {g_table:.3f} from {r.s11_db:g} dB vs {g_zin:.3f} "
                            f"from Zin {r.zin_text}"))
    return out


def _unparsed(tables) -> list[tuple[str, str]]:
    out = []
    for t in tables.values():
        for r in t.rows:
            if r.zin is None and r.zin_text:
                out.append((f"unparsed_zin:{t.name}:{r.label}",
                            f"impedance cell {r.zin_text!r} is not a single a+bj value"))
    return out


def _labels(tables) -> list[tuple[str, str]]:
    out = []
    for t in tables.values():
        for r in t.rows:
            if r.label != r.printed_label:
                out.append((f"label:{t.name}:{r.label}",
                            f"printed as {r.printed_label!r}"))
    return out


def _radius_list(tables, wavelength_mm, tol) -> list[tuple[str, str]]:
    out = []
    for rec in tables["sphere_radius_list"].records:
        num, _, den = rec["radius_wavelengths"].partition("/")
        frac = float(num) / float(den or 1)
        expect = frac * wavelength_mm
        got = float(rec["radius_mm"])
        if abs(got - expect) > tol * expect:
            out.append((f"radius_list:{rec['radius_wavelengths']}",
                        f"{got:g} mm listed, {frac:g} x {wavelength_mm:g} = {expect:g} mm"))
    return out


def _plating(tables, ratio_limit) -> list[tuple[str, str]]:
    out = []
    area = STANDARD_SPHERE_REFERENCE.area_mm2
    for rec in tables["plating_log"].records:
        hours = float(rec["hours"]) * (2 if rec["each_side"] == "yes" else 1)
        # one side at a time plates half the area for the listed hours
        a = area / 2 if rec["each_side"] == "yes" else area
        pred = faraday_thickness(float(rec["current_a"]), float(rec["hours"]), a)
        got = float(rec["thickness_mm"])
        if got / pred > ratio_limit:
            out.append((f"faraday:{rec['label']}",
                        f"logged {got:g} mm vs {pred:.3g} mm from charge "
                        f"({float(rec['current_a']):g} A, {hours:g} h total)"))
    return out


_WORDS = ("radius", "height", "length", "diameter")


def _parameter_word(path: str) -> str:
    name = path.rpartition(".")[2]
    return next(w for w in _WORDS if w in name)


def _sweep_labels(tables) -> list[tuple[str, str]]:
    """Printed column header and caption against the swept parameter."""
    out = []
    for t in tables.values():
        meta = t.meta
        if meta["kind"] != "sweep":
            continue
        word = _parameter_word(meta["parameter"])
        header = meta.get("printed_header", "").lower()
        if header and word not in header:
            out.append((f"header:{t.name}",
                        f"column header {meta['printed_header']!r} for a {word} sweep"))
        cap = meta.get("caption_parameter")
        if cap and cap != word:
            out.append((f"caption:{t.name}", f"caption names {cap} for a {word} sweep"))
    return out


def _feasible(tables) -> list[tuple[str, str]]:
    """Sweep points that cannot be built with the stated fixed dimensions."""
    out = []
    coax = CoaxModel()
    for t in tables.values():
        meta = t.meta
        if meta["kind"] != "sweep" or "family" not in meta:
            continue
        name = meta["parameter"].rpartition(".")[2]
        bad = []
        for r in t.rows:
            if r.value_mm is None:
                continue
            try:
                spec_from_dict({"family": meta["family"], **meta.get("fixed", {}),
                                name: r.value_mm}).validate(coax)
            except GeometryError:
                bad.append(r.value_mm)
        if bad:
            out.append((f"infeasible:{t.name}",
                        f"{name} in {sorted(bad)} impossible with {meta.get('fixed', {})}"))
    return out


def two_dip_response(dips_ghz, depth_db: float = 20.0, width_ghz: float = 0.025,
                     floor_db: float = -5.0) -> FrequencyResponse:
    """Synthetic S11 curve with Gaussian dips at ``dips_ghz`` (1.0-1.4 GHz)."""
    f = np.linspace(1.0e9, 1.4e9, 81)
    s = np.full_like(f, floor_db)
    for d in dips_ghz:
        s -= (depth_db - abs(floor_db)) * np.exp(-((f / 1e9 - d) / width_ghz) ** 2)
    return FrequencyResponse.from_s11(f, s)


def _expectations(tables, spec) -> list[tuple[str, bool, str]]:
    out = []
    for item in spec.get("select_best", []):
        rows = tables[item["table"]].result_rows()
        best = select_best(rows)
        ok = best.value == item["expect_value_mm"]
        out.append((f"select_best {item['table']}", ok,
                    f"picked {best.value:g} mm, expected {item['expect_value_mm']:g} mm"))
    for item in spec.get("trends", []):
        rows = [r for r in tables[item["table"]].result_rows()
                if r.value >= item.get("from_value_mm", -np.inf)]
        rep = trend_check(rows, item["metric"], item["direction"], item.get("slack", 0.0))
        out.append((f"trend {item['table']} {item['metric']} {item['direction']}", rep.ok,
                    f"{sum(p.ok for p in rep.pairs)}/{len(rep.pairs)} pairs"))
    for item in spec.get("double_resonance", []):
        tables[item["table"]].row(item["row"])
        dips = item["resonances_ghz"]
        found = [r.frequency / 1e9 for r in resonances(two_dip_response(dips)).resonances]
        ok = len(found) == len(dips) and all(abs(a - b) < 0.005 for a, b in zip(found, dips))
        out.append((f"double_resonance {item['table']}:{item['row']}", ok,
                    "found " + ", ".join(f"{f:.3f}" for f in found) + " GHz"))
    for item in spec.get("counts", []):
        n = len(tables[item["table"]].records)
        out.append((f"rows {item['table']}", n == item["rows"],
                    f"{n} rows, expected {item['rows']}"))
    return out


def check_fixtures() -> FixtureReport:
    """Validate all tables against the documented consistency notes."""
    rep = FixtureReport()
    meta = notes()
    tables = {}
    for name, info in meta["tables"].items():
        try:
            tables[name] = load_table(name)
        except (FixtureError, KeyError, ValueError, FileNotFoundError) as exc:
            rep.errors.append(f"{name}: {exc}")
            continue
        if len(tables[name].records) != info["rows"]:
            rep.errors.append(f"{name}: {len(tables[name].records)} rows, "
                              f"notes say {info['rows']}")
    if rep.errors:
        return rep
    cfg = meta["consistency"]
    detected = []
    for group in cfg["same_design"]:
        detected += _same_design(tables, group, cfg["tolerance"])
    detected += _s11_vs_zin(tables, cfg["s11_zin_gamma_tolerance"])
    detected += _unparsed(tables)
    detected += _labels(tables)
    detected += _sweep_labels(tables)
    detected += _feasible(tables)
    detected += _radius_list(tables, cfg["table_wavelength_mm"], cfg["radius_tolerance"])
    detected += _plating(tables, cfg["faraday_ratio_limit"])
    known = {k["id"] for k in meta["known_conflicts"]}
    seen = set()
    for fid, detail in detected:
        rep.findings.append(Finding(fid, detail, fid in known))
        seen.add(fid)
    rep.missing = sorted(known - seen)
    rep.expectations = _expectations(tables, meta.get("expectations", {}))
    return rep
