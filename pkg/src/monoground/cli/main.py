"""``monoground`` command line.

Every subcommand is a thin wrapper over the library.  Failures print
``error: <message>`` on stderr and exit with status 1; usage errors exit
with status 2.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from pathlib import Path

import numpy as np
import yaml

from .. import __version__
from ..analytic import DB_FLOOR, pattern_from_kh
from ..experiment.fixtures import FixtureError, check_fixtures
from ..experiment.runner import (PATTERN_COLUMNS, ScenarioError, pattern_at, run_scenario,
                                 run_sweep)
from ..fab import PlatingReference, SkinDepthQuery, plating_current, skin_depth
from ..fom import pattern_cut
from ..geometry import GeometryError, export_stl, generate, mesh_report
from .config import ConfigError, config_hash, parse_geometry_text, parse_scenario_text, \
    parse_sweep_text
from .manifest import RunManifest
from .svg import PolarPlotSpec, PolarTraceData, emit_polar_svg, emit_s11_svg

_EXPECTED = (ConfigError, GeometryError, ScenarioError, FixtureError, ValueError, OSError,
             yaml.YAMLError)


class CommandError(Exception):
    pass


def _suffix(path: str, allowed) -> str:
    ext = Path(path).suffix.lower().lstrip(".")
    if ext not in allowed:
        raise CommandError(f"{path}: output must end in one of "
                           f"{', '.join('.' + a for a in allowed)}")
    return ext


def _write(path, data) -> Path:
    p = Path(path)
    if p.parent != Path(""):
        p.parent.mkdir(parents=True, exist_ok=True)
    p.write_bytes(data if isinstance(data, bytes) else data.encode("utf-8"))
    return p


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------

def cmd_analytic_pattern(args) -> int:
    if args.points < 2:
        raise CommandError("--points must be >= 2")
    fmt = _suffix(args.out, ("csv", "svg"))
    theta = np.linspace(0.0, np.pi, args.points)
    pat = pattern_from_kh(args.kh, theta)
    db = pat.clamped_db(DB_FLOOR)
    deg = np.degrees(theta)
    if fmt == "csv":
        _write(args.out, _csv_text(["theta_deg", "magnitude_db"],
                                   [[f"{t:.4f}", f"{v:.4f}"] for t, v in zip(deg, db)]))
    else:
        # mirror onto the left half so the cut reads like an E-plane plot
        ang = np.concatenate([deg, 360.0 - deg[::-1][1:-1]])
        val = np.concatenate([db, db[::-1][1:-1]])
        spec = PolarPlotSpec((PolarTraceData(f"kh = {args.kh:g}", ang, val),),
                             title="image-theory monopole pattern")
        _write(args.out, emit_polar_svg(spec))
    print(f"wrote {args.out}")
    return 0


def cmd_mesh(args) -> int:
    fmt = _suffix(args.out, ("stl", "off"))
    text = Path(args.spec).read_text(encoding="utf-8")
    spec, coax = parse_geometry_text(text)
    mesh = generate(spec, coax, args.edge_mm)
    _write(args.out, export_stl(mesh) if fmt == "stl" else mesh.to_off())
    print(f"wrote {args.out} ({mesh.n_triangles} triangles)")
    if args.report:
        print(json.dumps(mesh_report(mesh), indent=2, sort_keys=True, default=float))
    return 0


def cmd_solve(args) -> int:
    raw = Path(args.scenario).read_bytes()
    sc = parse_scenario_text(raw.decode("utf-8"))
    out = Path(args.out_dir)
    manifest = RunManifest("solve", config_hash(raw))
    manifest.add_input(args.scenario)
    sc = dataclasses.replace(sc, output_dir=str(out))
    res = run_scenario(sc, workers=args.workers)
    files = list(res.files)
    files.append(_write(out / "s11.svg", emit_s11_svg(res.response.frequencies,
                                                      res.response.s11, label=sc.name)))
    if res.pattern is not None:
        traces = tuple(PolarTraceData(f"{p}-plane", t.angle_deg, t.normalized_db)
                       for p, t in (("E", pattern_cut(res.pattern, "E")),
                                    ("H", pattern_cut(res.pattern, "H"))))
        files.append(_write(out / "pattern.svg", emit_polar_svg(PolarPlotSpec(
            traces, title=f"{sc.name} at {res.pattern.frequency / 1e9:.3f} GHz"))))
    manifest.add_outputs(files, root=out)
    manifest.write(out)
    r = res.row
    print(f"{sc.name}: S11 min {r.s11_db:.2f} dB at {r.resonance_ghz:.4f} GHz, "
          f"Zin {r.zin.real:.2f}{r.zin.imag:+.2f}j ohm, {r.status}, "
          f"peak gain {r.gain_dbi:.2f} dBi")
    return 0


def cmd_sweep(args) -> int:
    raw = Path(args.plan).read_bytes()
    plan = parse_sweep_text(raw.decode("utf-8"))
    out = Path(args.out_dir)
    manifest = RunManifest("sweep", config_hash(raw))
    manifest.add_input(args.plan)
    res = run_sweep(plan, workers=args.workers, output_dir=str(out))
    manifest.add_outputs(res.files, root=out)
    manifest.write(out)
    failed = [r for r in res.rows if r.error]
    for r in res.rows:
        print(f"{r.label}: {r.status}")
    if res.best is not None:
        print(f"best: {res.best.label}")
    else:
        print("best: none (no resonant point)")
    if failed:
        raise CommandError(f"{len(failed)} of {len(res.rows)} sweep points failed")
    return 0


def cut_rows(pattern, plane: str):
    """Pattern-table rows that lie on the E-plane (phi 0/180) or H-plane cut."""
    g = pattern.gain_dbi
    co, cr = pattern.co_cross()
    t = np.degrees(pattern.theta)
    p = np.degrees(pattern.phi)
    if plane == "E":
        cells = [(i, j) for j in range(len(p)) if np.isclose(p[j], 0) or np.isclose(p[j], 180)
                 for i in range(len(t))]
    else:
        cells = [(i, j) for i in range(len(t)) if np.isclose(t[i], 90) for j in range(len(p))]
    if not cells:
        raise CommandError(f"pattern grid does not sample the {plane}-plane")
    return [[f"{t[i]:.3f}", f"{p[j]:.3f}", f"{g[i, j]:.4f}", f"{co[i, j]:.4f}",
             f"{cr[i, j]:.4f}"] for i, j in cells]


def cmd_pattern(args) -> int:
    fmt = _suffix(args.out, ("csv", "svg"))
    sc = parse_scenario_text(Path(args.scenario).read_text(encoding="utf-8"))
    pat = pattern_at(sc, args.freq_hz)
    if fmt == "csv":
        _write(args.out, _csv_text(PATTERN_COLUMNS, cut_rows(pat, args.cut)))
    else:
        tr = pattern_cut(pat, args.cut)
        spec = PolarPlotSpec((PolarTraceData(f"{args.cut}-plane (peak {tr.gain_dbi.max():.2f} "
                                             f"dBi)", tr.angle_deg, tr.normalized_db),),
                             title=f"{sc.name} at {args.freq_hz / 1e9:g} GHz")
        _write(args.out, emit_polar_svg(spec))
    print(f"wrote {args.out}")
    return 0


def cmd_skin_depth(args) -> int:
    d = skin_depth(SkinDepthQuery(args.freq_hz, args.sigma))
    print(f"{d:.2e} mm")
    return 0


def cmd_plating(args) -> int:
    data = yaml.safe_load(Path(args.ref).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise CommandError(f"{args.ref}: expected a mapping with area_mm2, current_a, hours "
                           "and thickness_mm")
    try:
        ref = PlatingReference.from_dict(data)
    except KeyError as exc:
        raise CommandError(f"{args.ref}: missing key {exc.args[0]!r}") from None
    amps = plating_current(args.area_mm2, ref, args.hours)
    print(f"{amps:.2f} A")
    return 0


def cmd_fixtures_check(args) -> int:
    rep = check_fixtures()
    for line in rep.lines():
        print(line)
    if not rep.ok:
        raise CommandError("fixture check failed")
    return 0


# ----------------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="monoground", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analytic", help="closed-form image-theory results")
    an_sub = an.add_subparsers(dest="analytic_command", required=True)
    ap_pat = an_sub.add_parser("pattern", help="normalized pattern for a given kh")
    ap_pat.add_argument("--kh", type=float, required=True)
    ap_pat.add_argument("--points", type=int, default=181)
    ap_pat.add_argument("--out", required=True, help="output .csv or .svg")
    ap_pat.set_defaults(func=cmd_analytic_pattern)

    me = sub.add_parser("mesh", help="mesh a ground plane and export it")
    me.add_argument("--spec", required=True, help="YAML file with a geometry section")
    me.add_argument("--edge-mm", type=float, default=12.0)
    me.add_argument("--out", required=True, help="output .stl (or .off listing)")
    me.add_argument("--report", action="store_true", help="print mesh statistics as JSON")
    me.set_defaults(func=cmd_mesh)

    so = sub.add_parser("solve", help="frequency sweep of one scenario")
    so.add_argument("--scenario", required=True)
    so.add_argument("--out-dir", required=True)
    so.add_argument("--workers", type=int, default=None)
    so.set_defaults(func=cmd_solve)

    sw = sub.add_parser("sweep", help="parameter sweep")
    sw.add_argument("--plan", required=True)
    sw.add_argument("--out-dir", required=True)
    sw.add_argument("--workers", type=int, default=None)
    sw.set_defaults(func=cmd_sweep)

    pa = sub.add_parser("pattern", help="far-field cut at one frequency")
    pa.add_argument("--scenario", required=True)
    pa.add_argument("--freq-hz", type=float, required=True)
    pa.add_argument("--cut", choices=("E", "H"), required=True)
    pa.add_argument("--out", required=True, help="output .csv or .svg")
    pa.set_defaults(func=cmd_pattern)

    fa = sub.add_parser("fab", help="fabrication planning")
    fa_sub = fa.add_subparsers(dest="fab_command", required=True)
    sd = fa_sub.add_parser("skin-depth", help="conductor skin depth in mm")
    sd.add_argument("--freq-hz", type=float, required=True)
    sd.add_argument("--sigma", type=float, default=SkinDepthQuery.conductivity,
                    help="conductivity in S/m (default copper)")
    sd.set_defaults(func=cmd_skin_depth)
    pl = fa_sub.add_parser("plating", help="plating current scaled from a reference run")
    pl.add_argument("--area-mm2", type=float, required=True)
    pl.add_argument("--ref", required=True, help="YAML reference run")
    pl.add_argument("--hours", type=float, required=True)
    pl.set_defaults(func=cmd_plating)

    fx = sub.add_parser("fixtures", help="reference table checks")
    fx_sub = fx.add_subparsers(dest="fixtures_command", required=True)
    fc = fx_sub.add_parser("check", help="validate the checked-in tables")
    fc.set_defaults(func=cmd_fixtures_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CommandError, *_EXPECTED) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
