"""Frozen output headers; changing one is a breaking change for downstream tools."""

import csv
import io

from monoground.experiment import (PATTERN_COLUMNS, RESPONSE_COLUMNS, ROW_COLUMNS,
                                   FrequencyPlan, ResultRow, rows_csv)
from monoground.experiment.fixtures import RESULT_COLUMNS
from monoground.experiment.runner import write_sweep_outputs
from monoground.fom import FrequencyResponse


def test_response_header():
    assert RESPONSE_COLUMNS == ["freq_hz", "re_zin_ohm", "im_zin_ohm", "s11_db"]


def test_pattern_header():
    assert PATTERN_COLUMNS == ["theta_deg", "phi_deg", "gain_dbi", "co_db", "cross_db"]


def test_summary_header():
    assert ROW_COLUMNS == ["value_mm", "label", "resonance_ghz", "s11_db", "re_zin_ohm",
                           "im_zin_ohm", "bandwidth_pct", "gain_dbi", "resonances", "status"]
    assert rows_csv([ResultRow()]).splitlines()[0] == ",".join(ROW_COLUMNS)


def test_fixture_header():
    assert RESULT_COLUMNS == ["label", "printed_label", "value_mm", "source", "s11", "zin",
                              "bandwidth_pct", "gain_db"]


def test_sweep_files(tmp_path):
    f = FrequencyPlan(1e9, 1.2e9, 3).frequencies()
    resp = FrequencyResponse(f, [50 + 0j, 40 + 5j, 60 - 5j])
    rows = (ResultRow(value=1.0, label="a"), ResultRow(value=2.0, label="b", error="boom"))
    sweep, long = write_sweep_outputs(tmp_path, None, rows, (resp, None))
    assert sweep.name == "sweep.csv" and long.name == "responses.csv"
    table = list(csv.reader(io.StringIO(long.read_text())))
    assert table[0] == ["value_mm"] + RESPONSE_COLUMNS
    assert len(table) == 4 and all(r[0] == "1.0000" for r in table[1:])
    assert table[1][1] == "1000000000.0"
