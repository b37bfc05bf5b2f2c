"""Scenario and sweep orchestration.

A :class:`Scenario` is one ground plane, one coax and one frequency plan.
:func:`run_scenario` meshes it, solves every frequency, finds the best
match, re-solves there for the far field and condenses everything into a
:class:`ResultRow`.  :func:`run_sweep` repeats that over one parameter.

Frequencies and sweep points can be spread over worker processes.  Every
unit of work is a pure function of its inputs and results are gathered in
input order, so output files do not depend on the worker count.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..efie.assembly import Assembler, AssemblyOptions
from ..efie.basis import build_basis
from ..efie.solver import Excitation, solve
from ..fom import (FarFieldPattern, FrequencyResponse, ResonanceReport, far_field, peak_gain,
                   resonances, s11_db)
from ..geometry.generate import generate
from ..geometry.specs import CoaxModel, GroundPlaneSpec, PlanarWithCone

DEFAULT_START_HZ = 0.8e9
DEFAULT_STOP_HZ = 1.8e9
DEFAULT_POINTS = 51
CONE_STOP_HZ = 3.5e9
DEFAULT_EDGE_MM = 12.0

RESPONSE_COLUMNS = ["freq_hz", "re_zin_ohm", "im_zin_ohm", "s11_db"]
PATTERN_COLUMNS = ["theta_deg", "phi_deg", "gain_dbi", "co_db", "cross_db"]
ROW_COLUMNS = ["value_mm", "label", "resonance_ghz", "s11_db", "re_zin_ohm", "im_zin_ohm",
               "bandwidth_pct", "gain_dbi", "resonances", "status"]
NOT_RESONANT = "N/A"


class ScenarioError(RuntimeError):
    """A scenario failed; the message names the scenario."""


@dataclass(frozen=True)
class FrequencyPlan:
    start_hz: float = DEFAULT_START_HZ
    stop_hz: float = DEFAULT_STOP_HZ
    points: int = DEFAULT_POINTS

    def __post_init__(self):
        if not 0 < self.start_hz < self.stop_hz:
            raise ValueError("frequency plan needs 0 < start_hz < stop_hz")
        if int(self.points) != self.points or self.points < 3:
            raise ValueError("frequency plan needs at least 3 points")

    @property
    def step_hz(self) -> float:
        return (self.stop_hz - self.start_hz) / (self.points - 1)

    def frequencies(self) -> np.ndarray:
        return np.linspace(self.start_hz, self.stop_hz, int(self.points))

    def widened(self, stop_hz: float) -> "FrequencyPlan":
        """Extend to at least ``stop_hz`` keeping the step."""
        if self.stop_hz >= stop_hz:
            return self
        n = math.ceil(round((stop_hz - self.start_hz) / self.step_hz, 9)) + 1
        return FrequencyPlan(self.start_hz, self.start_hz + (n - 1) * self.step_hz, n)


@dataclass(frozen=True)
class Scenario:
    """One simulation setup.

    Attributes
    ----------
    spec : GroundPlaneSpec
    coax : CoaxModel
    plan : FrequencyPlan
    edge_mm : float
        Target mesh edge length.
    output_dir : str or None
        Where :func:`run_scenario` writes its tables.
    name : str
    gain_at_hz : float or None
        Evaluate the far field at this frequency instead of the best match.
    auto_widen : bool
        Cone grounds resonate far above the default band; extend their plan
        up to 3.5 GHz.
    workers : int
        Default process count for runs of this scenario; never changes the
        results.
    """

    spec: GroundPlaneSpec
    coax: CoaxModel = field(default_factory=CoaxModel)
    plan: FrequencyPlan = field(default_factory=FrequencyPlan)
    edge_mm: float = DEFAULT_EDGE_MM
    output_dir: str | None = None
    name: str = "scenario"
    gain_at_hz: float | None = None
    auto_widen: bool = True
    workers: int = 1

    def __post_init__(self):
        if not self.edge_mm > 0:
            raise ValueError("mesh edge length must be > 0")
        if int(self.workers) != self.workers or self.workers < 0:
            raise ValueError("workers must be a non-negative integer")

    def effective_plan(self) -> FrequencyPlan:
        if self.auto_widen and isinstance(self.spec, PlanarWithCone):
            return self.plan.widened(CONE_STOP_HZ)
        return self.plan


@dataclass(frozen=True)
class ResultRow:
    """Condensed figures of merit for one scenario or sweep point.

    ``bandwidth_pct`` is None when S11 never reaches -10 dB; the other
    columns still describe the best match in the band.
    """

    value: float | None = None
    label: str = ""
    resonance_ghz: float | None = None
    s11_db: float | None = None
    zin: complex | None = None
    bandwidth_pct: float | None = None
    resonant: bool = False
    gain_dbi: float | None = None
    n_resonances: int = 0
    lower_bound: bool = False
    error: str | None = None

    @property
    def status(self) -> str:
        if self.error:
            return "error: " + " ".join(self.error.split())
        if not self.resonant:
            return "not-resonant"
        return "resonant-lower-bound" if self.lower_bound else "resonant"

    def csv_fields(self) -> list[str]:
        def f(x, nd):
            return "" if x is None else f"{x:.{nd}f}"
        bw = NOT_RESONANT if self.bandwidth_pct is None else f(self.bandwidth_pct, 3)
        if self.error:
            bw = ""
        z = self.zin
        return [f(self.value, 4), self.label, f(self.resonance_ghz, 6), f(self.s11_db, 3),
                f(None if z is None else z.real, 3), f(None if z is None else z.imag, 3),
                bw, f(self.gain_dbi, 3), str(self.n_resonances), self.status]


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    scenario: Scenario
    response: FrequencyResponse
    report: ResonanceReport
    pattern: FarFieldPattern | None
    row: ResultRow
    files: tuple = ()


# ----------------------------------------------------------------------------
# workers
# ----------------------------------------------------------------------------

def _workers(workers: int) -> int:
    if workers <= 0:
        return os.cpu_count() or 1
    return int(workers)


def _ordered_map(fn, items, workers):
    """``map`` that keeps input order; processes only when ``workers > 1``."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as ex:
        return list(ex.map(fn, items))


class _Model:
    """Mesh, basis and assembler of a scenario, built once per process."""

    def __init__(self, scenario: Scenario, options: AssemblyOptions | None):
        plan = scenario.effective_plan()
        self.mesh = generate(scenario.spec, scenario.coax, scenario.edge_mm,
                             max_frequency=plan.stop_hz)
        self.basis = build_basis(self.mesh)
        self.assembler = Assembler(self.basis, options)
        self.excitation = Excitation(gap_mm=scenario.coax.feed_gap)

    def solve(self, frequency: float):
        return solve(self.assembler.matrix(frequency), self.basis, self.excitation)


def _chunk_solve(args):
    scenario, options, freqs = args
    model = _Model(scenario, options)
    return [model.solve(f).zin for f in freqs]


def _split(values, parts):
    idx = np.array_split(np.arange(len(values)), parts)
    return [[float(values[i]) for i in chunk] for chunk in idx if len(chunk)]


# ----------------------------------------------------------------------------
# scenario
# ----------------------------------------------------------------------------

def _summarize(scenario, model, response, report, value=None, label=None):
    f_eval = scenario.gain_at_hz or report.best_frequency
    sol = model.solve(f_eval)
    pattern = far_field(sol)
    res = None
    if report.resonant:
        res = min(report.resonances, key=lambda r: abs(r.frequency - report.best_frequency))
    row = ResultRow(
        value=value, label=label if label is not None else scenario.name,
        resonance_ghz=report.best_frequency / 1e9, s11_db=float(s11_db(sol.zin)),
        zin=sol.zin, bandwidth_pct=None if res is None else res.bandwidth_pct,
        resonant=report.resonant, gain_dbi=peak_gain(pattern),
        n_resonances=len(report.resonances),
        lower_bound=bool(res is not None and res.lower_bound))
    return pattern, row


def run_scenario(scenario: Scenario, workers: int | None = None,
                 options: AssemblyOptions | None = None,
                 persist: bool = True) -> ScenarioResult:
    """Generate, solve over the plan, and reduce to figures of merit.

    Parameters
    ----------
    scenario : Scenario
    workers : int, optional
        Processes for the frequency loop (default ``scenario.workers``);
        ``0`` uses all CPUs.
    options : AssemblyOptions, optional
    persist : bool
        Write ``response.csv``, ``pattern.csv`` and ``summary.csv`` to
        ``scenario.output_dir`` when it is set.

    Raises
    ------
    ScenarioError
        Wrapping any mesh or solver failure.
    """
    try:
        freqs = scenario.effective_plan().frequencies()
        n = _workers(scenario.workers if workers is None else workers)
        if n > 1:
            chunks = _split(freqs, n)
            zin = [z for part in _ordered_map(_chunk_solve, [(scenario, options, c) for c in chunks], n)
                   for z in part]
            model = _Model(scenario, options)
        else:
            model = _Model(scenario, options)
            zin = [model.solve(f).zin for f in freqs]
        response = FrequencyResponse(freqs, np.asarray(zin))
        report = resonances(response)
        pattern, row = _summarize(scenario, model, response, report)
    except Exception as exc:
        raise ScenarioError(f"scenario {scenario.name!r}: {exc}") from exc
    files = ()
    if persist and scenario.output_dir:
        files = write_scenario_outputs(Path(scenario.output_dir), response, pattern, row)
    return ScenarioResult(scenario, response, report, pattern, row, files)


def pattern_at(scenario: Scenario, frequency: float,
               options: AssemblyOptions | None = None) -> FarFieldPattern:
    """Far-field pattern of ``scenario`` solved at a single frequency (Hz)."""
    if not frequency > 0:
        raise ValueError("frequency must be > 0")
    try:
        return far_field(_Model(scenario, options).solve(float(frequency)))
    except Exception as exc:
        raise ScenarioError(f"scenario {scenario.name!r}: {exc}") from exc


# ----------------------------------------------------------------------------
# sweeps
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SelectionRule:
    """Ordered criteria for :func:`select_best`.

    Known criteria: ``bandwidth`` (larger wins), ``gain`` (larger wins),
    ``reactance`` (smaller ``|Im Zin|`` wins), ``match`` (lower S11 wins).
    """

    criteria: tuple = ("bandwidth", "gain", "reactance")

    def __post_init__(self):
        bad = set(self.criteria) - set(_CRITERIA)
        if bad or not self.criteria:
            raise ValueError(f"unknown selection criteria {sorted(bad)}; "
                             f"choose from {sorted(_CRITERIA)}")


def _neg(x):
    return -x if x is not None else math.inf


_CRITERIA = {
    "bandwidth": lambda r: _neg(r.bandwidth_pct),
    "gain": lambda r: _neg(r.gain_dbi),
    "reactance": lambda r: abs(r.zin.imag) if r.zin is not None else math.inf,
    "match": lambda r: r.s11_db if r.s11_db is not None else math.inf,
}


def _split_path(path: str) -> tuple[str, str]:
    section, _, name = path.rpartition(".")
    section = section or "geometry"
    if section not in ("geometry", "coax"):
        raise ValueError(f"sweep parameter {path!r} must be under geometry or coax")
    return section, name


@dataclass(frozen=True)
class SweepPlan:
    """A base scenario and one parameter taking a list of values (mm)."""

    base: Scenario
    parameter: str
    values: tuple
    rule: SelectionRule = field(default_factory=SelectionRule)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) < 2:
            raise ValueError("a sweep needs at least two values")
        section, name = _split_path(self.parameter)
        target = self.base.spec if section == "geometry" else self.base.coax
        if name not in {f.name for f in dataclasses.fields(target)}:
            raise ValueError(f"sweep parameter {self.parameter!r} is not a field of "
                             f"{type(target).__name__}")

    def scenario(self, value: float) -> Scenario:
        section, name = _split_path(self.parameter)
        base = self.base
        if section == "geometry":
            cur = getattr(base.spec, name)
            v = int(value) if isinstance(cur, int) and float(value).is_integer() else value
            return dataclasses.replace(base, spec=dataclasses.replace(base.spec, **{name: v}),
                                       output_dir=None, workers=1)
        return dataclasses.replace(base, coax=dataclasses.replace(base.coax, **{name: value}),
                                   output_dir=None, workers=1)


@dataclass(frozen=True, eq=False)
class SweepResult:
    plan: SweepPlan
    rows: tuple
    responses: tuple          # FrequencyResponse or None per value
    best: ResultRow | None
    files: tuple = ()


def _run_point(args):
    plan, value, options = args
    label = f"{plan.parameter}={value:g}"
    try:
        scenario = plan.scenario(value)
        model = _Model(scenario, options)
        freqs = scenario.effective_plan().frequencies()
        response = FrequencyResponse(freqs, np.array([model.solve(f).zin for f in freqs]))
        report = resonances(response)
        _, row = _summarize(scenario, model, response, report, value=value, label=label)
        return row, response
    except Exception as exc:
        return ResultRow(value=value, label=label, error=f"{type(exc).__name__}: {exc}"), None


def run_sweep(plan: SweepPlan, workers: int | None = None,
              options: AssemblyOptions | None = None, output_dir: str | None = None,
              persist: bool = True) -> SweepResult:
    """Run every sweep value; failures are recorded in their row.

    Rows follow the order of ``plan.values``.  ``sweep.csv`` and
    ``responses.csv`` are written to ``output_dir`` (default: the base
    scenario's output directory).
    """
    n = _workers(plan.base.workers if workers is None else workers)
    out = _ordered_map(_run_point, [(plan, v, options) for v in plan.values], n)
    rows = tuple(r for r, _ in out)
    responses = tuple(resp for _, resp in out)
    try:
        best = select_best(rows, plan.rule)
    except ValueError:
        best = None
    files = ()
    target = output_dir or plan.base.output_dir
    if persist and target:
        files = write_sweep_outputs(Path(target), plan, rows, responses)
    return SweepResult(plan, rows, responses, best, files)


def select_best(rows, rule: SelectionRule | None = None) -> ResultRow:
    """Best resonant row under ``rule`` (default: bandwidth, gain, reactance).

    Raises
    ------
    ValueError
        If no row is resonant.
    """
    rule = rule or SelectionRule()
    cands = [r for r in rows if r.resonant and not r.error]
    if not cands:
        raise ValueError("no resonant rows to select from")
    # min() keeps the first of equal keys, so input order breaks full ties
    return min(cands, key=lambda r: tuple(_CRITERIA[c](r) for c in rule.criteria))


_METRICS = {
    "gain": lambda r: r.gain_dbi,
    "bandwidth": lambda r: r.bandwidth_pct,
    "resonance": lambda r: r.resonance_ghz,
    "s11": lambda r: r.s11_db,
    "re_zin": lambda r: None if r.zin is None else r.zin.real,
    "im_zin": lambda r: None if r.zin is None else r.zin.imag,
}


@dataclass(frozen=True)
class PairOutcome:
    a_value: float | None
    b_value: float | None
    a: float | None
    b: float | None
    ok: bool


@dataclass(frozen=True)
class TrendReport:
    metric: str
    direction: str
    slack: float
    pairs: tuple

    @property
    def ok(self) -> bool:
        return all(p.ok for p in self.pairs)


def trend_check(rows, metric: str, direction: str = "non-increasing",
                slack: float = 0.0) -> TrendReport:
    """Check a monotone trend between consecutive rows.

    ``direction`` is ``non-increasing``, ``non-decreasing`` or ``constant``;
    a step may go the wrong way by at most ``slack``.  A pair with a
    missing value fails.
    """
    if metric not in _METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(_METRICS)}")
    if direction not in ("non-increasing", "non-decreasing", "constant"):
        raise ValueError(f"unknown direction {direction!r}")
    get = _METRICS[metric]
    pairs = []
    rows = list(rows)
    for ra, rb in zip(rows, rows[1:]):
        a, b = get(ra), get(rb)
        if a is None or b is None or ra.error or rb.error:
            ok = False
        elif direction == "non-increasing":
            ok = b <= a + slack
        elif direction == "non-decreasing":
            ok = b >= a - slack
        else:
            ok = abs(b - a) <= slack
        pairs.append(PairOutcome(ra.value, rb.value, a, b, bool(ok)))
    return TrendReport(metric, direction, slack, tuple(pairs))


# ----------------------------------------------------------------------------
# tables
# ----------------------------------------------------------------------------

def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def response_csv(response: FrequencyResponse) -> str:
    s = response.s11
    return _csv(RESPONSE_COLUMNS, [
        [f"{f:.1f}", f"{z.real:.6f}", f"{z.imag:.6f}", f"{v:.4f}"]
        for f, z, v in zip(response.frequencies, response.zin, s)])


def pattern_csv(pattern: FarFieldPattern) -> str:
    g = pattern.gain_dbi
    co, cr = pattern.co_cross()
    t = np.degrees(pattern.theta)
    p = np.degrees(pattern.phi)
    rows = []
    for i in range(len(t)):
        for j in range(len(p)):
            rows.append([f"{t[i]:.3f}", f"{p[j]:.3f}", f"{g[i, j]:.4f}",
                         f"{co[i, j]:.4f}", f"{cr[i, j]:.4f}"])
    return _csv(PATTERN_COLUMNS, rows)


def rows_csv(rows) -> str:
    return _csv(ROW_COLUMNS, [r.csv_fields() for r in rows])


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))
    return path


def write_scenario_outputs(out_dir: Path, response, pattern, row) -> tuple:
    files = [_write(out_dir / "response.csv", response_csv(response)),
             _write(out_dir / "summary.csv", rows_csv([row]))]
    if pattern is not None:
        files.append(_write(out_dir / "pattern.csv", pattern_csv(pattern)))
    return tuple(files)


def write_sweep_outputs(out_dir: Path, plan: SweepPlan, rows, responses) -> tuple:
    long = []
    for row, resp in zip(rows, responses):
        if resp is None:
            continue
        for f, z, s in zip(resp.frequencies, resp.zin, resp.s11):
            long.append([f"{row.value:.4f}", f"{f:.1f}", f"{z.real:.6f}", f"{z.imag:.6f}",
                         f"{s:.4f}"])
    return (_write(out_dir / "sweep.csv", rows_csv(rows)),
            _write(out_dir / "responses.csv", _csv(["value_mm"] + RESPONSE_COLUMNS, long)))
