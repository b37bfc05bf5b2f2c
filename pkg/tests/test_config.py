import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monoground.cli import (ConfigError, config_hash, parse_scenario_text, parse_sweep_text,
                            serialize_scenario, serialize_sweep)
from monoground.experiment import FrequencyPlan
from monoground.geometry import CoaxModel, Planar, Sphere

SPHERE = """\
geometry:
  type: sphere
  radius: 57.5
sweep: {start_hz: 1.1e9, stop_hz: 1.5e9, points: 9}
mesh: {edge_mm: 14}
output: {dir: results/sphere}
run: {name: sphere, workers: 2}
"""


def test_minimal_file_takes_defaults():
    sc = parse_scenario_text("geometry: {type: planar}\n")
    assert sc.spec == Planar()
    assert sc.coax == CoaxModel()
    assert sc.plan == FrequencyPlan()
    assert sc.edge_mm == 12.0 and sc.output_dir is None


def test_full_file():
    sc = parse_scenario_text(SPHERE)
    assert sc.spec == Sphere(radius=57.5)
    assert sc.plan == FrequencyPlan(1.1e9, 1.5e9, 9)
    assert sc.edge_mm == 14.0 and sc.workers == 2 and sc.name == "sphere"
    assert sc.output_dir == "results/sphere"


def test_negative_radius_names_key_and_line():
    text = "# sphere\ngeometry:\n  type: sphere\n  radius: -5\n"
    with pytest.raises(ConfigError) as exc:
        parse_scenario_text(text)
    assert exc.value.path == "geometry.radius"
    assert exc.value.line == 4
    assert str(exc.value) == "geometry.radius: must be > 0 (got -5) (line 4)"


@pytest.mark.parametrize("text, path", [
    ("geometry: {type: planar, colour: red}\n", "geometry.colour"),
    ("geometry: {type: planar}\nsolver: {}\n", "solver"),
    ("geometry: {type: donut}\n", "geometry.type"),
    ("geometry: {radius: 3}\n", "geometry.type"),
    ("coax: {feed_gap: 1}\n", "geometry"),
    ("geometry: {type: planar}\nsweep: {points: 2.5}\n", "sweep.points"),
    ("geometry: {type: planar}\nsweep: {start_hz: 2e9, stop_hz: 1e9}\n", "sweep"),
    ("geometry: {type: planar}\nmesh: {edge_mm: abc}\n", "mesh.edge_mm"),
    ("geometry: {type: planar}\nrun: {auto_widen: 3}\n", "run.auto_widen"),
    ("geometry: {type: planar}\ngeometry: {type: sphere}\n", "geometry"),
    ("geometry: [1, 2\n", "<document>"),
    ("- 1\n- 2\n", "<document>"),
])
def test_schema_errors_name_the_path(text, path):
    with pytest.raises(ConfigError) as exc:
        parse_scenario_text(text)
    assert exc.value.path == path


def test_exponent_without_sign_is_accepted():
    # YAML 1.1 reads 1.3e9 as a string; it still has to parse as a number
    sc = parse_scenario_text("geometry: {type: planar}\nrun: {gain_at_hz: 1.3e9}\n")
    assert sc.gain_at_hz == 1.3e9


def test_sweep_plan_file():
    text = SPHERE + "vary:\n  parameter: geometry.radius\n  values_mm: [28.75, 57.5]\n" \
                    "  select: [gain]\n"
    plan = parse_sweep_text(text)
    assert plan.values == (28.75, 57.5)
    assert plan.rule.criteria == ("gain",)
    with pytest.raises(ConfigError, match="vary"):
        parse_scenario_text(text)
    with pytest.raises(ConfigError) as exc:
        parse_sweep_text(SPHERE)
    assert exc.value.path == "vary"
    with pytest.raises(ConfigError) as exc:
        parse_sweep_text(SPHERE + "vary: {parameter: geometry.side, values_mm: [1, 2]}\n")
    assert exc.value.path == "vary.parameter"


def test_scenario_round_trip():
    sc = parse_scenario_text(SPHERE)
    assert parse_scenario_text(serialize_scenario(sc)) == sc
    plan = parse_sweep_text(SPHERE + "vary: {parameter: geometry.radius, values_mm: [30, 60]}\n")
    assert parse_sweep_text(serialize_sweep(plan)) == plan


@settings(max_examples=25, deadline=None)
@given(st.floats(20.0, 200.0), st.floats(0.5, 3.0), st.integers(3, 101))
def test_round_trip_property(radius, gap, points):
    sc = parse_scenario_text("geometry: {type: sphere}\n")
    sc = dataclasses.replace(sc, spec=Sphere(radius=radius),
                             coax=dataclasses.replace(sc.coax, feed_gap=gap),
                             plan=FrequencyPlan(1e9, 2e9, points))
    assert parse_scenario_text(serialize_scenario(sc)) == sc


def test_config_hash_is_sha256():
    assert config_hash(b"") == \
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
