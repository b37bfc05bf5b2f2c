import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from monoground.experiment import (CONE_STOP_HZ, ROW_COLUMNS, FrequencyPlan, ResultRow,
                                   Scenario, ScenarioError, SelectionRule, SweepPlan,
                                   pattern_at, rows_csv, run_scenario, run_sweep, select_best,
                                   trend_check)
from monoground.geometry import Planar, PlanarWithCone

SMALL = FrequencyPlan(1.2e9, 1.4e9, 3)


def row(value, bw=None, gain=None, zin=50 + 0j, s11=-15.0, **kw):
    return ResultRow(value=value, label=f"v={value}", resonance_ghz=1.3, s11_db=s11, zin=zin,
                     bandwidth_pct=bw, resonant=bw is not None, gain_dbi=gain, **kw)


# ----------------------------------------------------------------------------
# plans and rows
# ----------------------------------------------------------------------------

def test_frequency_plan_grid():
    p = FrequencyPlan()
    f = p.frequencies()
    assert len(f) == 51 and f[0] == 0.8e9 and f[-1] == 1.8e9
    assert_allclose(p.step_hz, 20e6)


@pytest.mark.parametrize("args", [(1.5e9, 1.0e9, 5), (0.0, 1e9, 5), (1e9, 2e9, 2),
                                  (1e9, 2e9, 4.5)])
def test_frequency_plan_rejects(args):
    with pytest.raises(ValueError):
        FrequencyPlan(*args)


def test_widened_keeps_step():
    p = FrequencyPlan().widened(CONE_STOP_HZ)
    assert_allclose(p.step_hz, 20e6)
    assert p.stop_hz >= CONE_STOP_HZ
    assert FrequencyPlan().widened(1e9) == FrequencyPlan()


def test_cone_scenarios_widen_automatically():
    sc = Scenario(PlanarWithCone())
    assert sc.effective_plan().stop_hz >= CONE_STOP_HZ
    assert Scenario(PlanarWithCone(), auto_widen=False).effective_plan() == FrequencyPlan()
    assert Scenario(Planar()).effective_plan() == FrequencyPlan()


def test_row_status_strings():
    assert row(1.0).status == "not-resonant"
    assert row(1.0, bw=5.0).status == "resonant"
    assert row(1.0, bw=5.0, lower_bound=True).status == "resonant-lower-bound"
    assert ResultRow(value=1.0, error="GeometryError: bad\nthing").status == \
        "error: GeometryError: bad thing"


def test_row_csv_fields_match_header():
    fields = row(57.5, bw=12.3456, gain=2.1).csv_fields()
    assert len(fields) == len(ROW_COLUMNS)
    assert fields[6] == "12.346"
    assert row(57.5).csv_fields()[6] == "N/A"
    assert ResultRow(value=1.0, error="x").csv_fields()[6] == ""


# ----------------------------------------------------------------------------
# selection and trends
# ----------------------------------------------------------------------------

def test_select_best_orders_by_criteria():
    rows = [row(1, bw=10, gain=2), row(2, bw=12, gain=1), row(3, bw=12, gain=3), row(4)]
    assert select_best(rows).value == 3
    assert select_best(rows, SelectionRule(("gain",))).value == 3
    assert select_best(rows, SelectionRule(("gain", "bandwidth"))).value == 3
    tie = [row(1, bw=10, gain=2, zin=50 + 5j), row(2, bw=10, gain=2, zin=50 - 1j)]
    assert select_best(tie).value == 2


def test_select_best_without_resonant_rows():
    with pytest.raises(ValueError):
        select_best([row(1), row(2)])


def test_unknown_selection_criterion():
    with pytest.raises(ValueError):
        SelectionRule(("beauty",))


def test_trend_check_with_slack():
    rows = [row(1, bw=1, gain=3.0), row(2, bw=1, gain=3.4), row(3, bw=1, gain=2.0)]
    assert not trend_check(rows, "gain").ok
    assert trend_check(rows, "gain", slack=0.5).ok
    assert trend_check(rows, "bandwidth", "constant").ok
    rep = trend_check(rows + [row(4)], "gain", slack=0.5)
    assert not rep.pairs[-1].ok
    with pytest.raises(ValueError):
        trend_check(rows, "weight")
    with pytest.raises(ValueError):
        trend_check(rows, "gain", "sideways")


def test_sweep_plan_validation():
    base = Scenario(Planar())
    with pytest.raises(ValueError):
        SweepPlan(base, "geometry.radius", (1.0, 2.0))
    with pytest.raises(ValueError):
        SweepPlan(base, "geometry.side", (1.0,))
    with pytest.raises(ValueError):
        SweepPlan(base, "mesh.edge_mm", (1.0, 2.0))
    p = SweepPlan(base, "coax.feed_gap", (1.0, 2.0))
    assert p.scenario(1.0).coax.feed_gap == 1.0


# ----------------------------------------------------------------------------
# solver-backed runs
# ----------------------------------------------------------------------------

@pytest.fixture(scope="module")
def small_sweep():
    base = Scenario(Planar(), plan=SMALL, edge_mm=20.0, name="planar")
    return run_sweep(SweepPlan(base, "geometry.side", (4.0, 115.0)), workers=1, persist=False)


def test_sweep_records_failures_in_place(small_sweep):
    bad, good = small_sweep.rows
    assert bad.value == 4.0 and bad.status.startswith("error: ")
    assert small_sweep.responses[0] is None
    assert good.error is None and good.gain_dbi is not None
    assert len(small_sweep.responses[1].frequencies) == 3


def test_sweep_rows_csv(small_sweep):
    lines = rows_csv(small_sweep.rows).splitlines()
    assert lines[0] == ",".join(ROW_COLUMNS)
    assert len(lines) == 3


def test_scenario_failure_is_wrapped():
    with pytest.raises(ScenarioError, match="tiny"):
        run_scenario(Scenario(Planar(side=4.0), plan=SMALL, name="tiny"), persist=False)
    with pytest.raises(ValueError):
        pattern_at(Scenario(Planar()), 0.0)


def test_scenario_writes_tables(tmp_path):
    sc = Scenario(Planar(), plan=SMALL, edge_mm=20.0, output_dir=str(tmp_path))
    res = run_scenario(sc)
    names = sorted(p.name for p in res.files)
    assert names == ["pattern.csv", "response.csv", "summary.csv"]
    assert math.isfinite(res.row.gain_dbi)
    assert np.all(np.isfinite(res.response.s11))
