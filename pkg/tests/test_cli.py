import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from monoground.cli.main import main
from monoground.cli.manifest import file_sha256, read_manifest

SCENARIO = """\
geometry: {type: planar}
sweep: {start_hz: 1.2e9, stop_hz: 1.4e9, points: 3}
mesh: {edge_mm: 20}
run: {name: planar}
"""
DATA_FILES = ("response.csv", "summary.csv", "pattern.csv", "s11.svg", "pattern.svg")


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_skin_depth_command(capsys):
    code, out, _ = run(["fab", "skin-depth", "--freq-hz", "1.3e9"], capsys)
    assert code == 0 and out.strip() == "1.83e-03 mm"


def test_plating_command(tmp_path, capsys):
    ref = tmp_path / "ref.yaml"
    ref.write_text("area_mm2: 41547.56284\ncurrent_a: 1.2\nhours: 4\nthickness_mm: 0.13\n")
    code, out, _ = run(["fab", "plating", "--area-mm2", str(4 * np.pi * 86.25 ** 2), "--ref",
                        str(ref), "--hours", "4"], capsys)
    assert code == 0 and out.strip() == "2.70 A"
    ref.write_text("area_mm2: 1.0\n")
    code, _, err = run(["fab", "plating", "--area-mm2", "1", "--ref", str(ref), "--hours", "1"],
                       capsys)
    assert code == 1 and err.startswith("error: ") and "current_a" in err


def test_usage_error_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["fab", "skin-depth", "--frequency", "1e9"])
    assert exc.value.code == 2


def test_config_error_exits_one(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("geometry:\n  type: sphere\n  radius: -5\n")
    code, _, err = run(["solve", "--scenario", str(bad), "--out-dir", str(tmp_path / "o")],
                       capsys)
    assert code == 1
    assert err.strip() == "error: geometry.radius: must be > 0 (got -5) (line 3)"
    code, _, err = run(["solve", "--scenario", str(tmp_path / "nope.yaml"), "--out-dir",
                        str(tmp_path)], capsys)
    assert code == 1 and "nope.yaml" in err


def test_analytic_pattern_csv_and_svg(tmp_path, capsys):
    out = tmp_path / "p.csv"
    assert main(["analytic", "pattern", "--kh", "1.5708", "--out", str(out)]) == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == ["theta_deg", "magnitude_db"]
    assert len(rows) == 182
    db = np.array([float(r[1]) for r in rows[1:]])
    assert db.max() == 0.0 and db.min() == -80.0
    assert float(rows[1 + int(np.argmax(db))][0]) == 90.0
    svg = tmp_path / "p.svg"
    assert main(["analytic", "pattern", "--kh", "1.5708", "--out", str(svg)]) == 0
    assert svg.read_bytes().startswith(b"<?xml")
    assert main(["analytic", "pattern", "--kh", "1", "--out", str(tmp_path / "p.png")]) == 1


def test_mesh_command_writes_readable_stl(tmp_path, capsys):
    mesh_mod = pytest.importorskip("stl.mesh")
    spec = tmp_path / "g.yaml"
    spec.write_text("geometry: {type: sphere}\n")
    out = tmp_path / "g.stl"
    code, text, _ = run(["mesh", "--spec", str(spec), "--out", str(out), "--report"], capsys)
    assert code == 0
    report = json.loads(text[text.index("{"):])
    m = mesh_mod.Mesh.from_file(str(out))
    assert len(m.vectors) == report["F"]
    assert report["euler"] == 2


@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    base = tmp_path_factory.mktemp("solve")
    cfg = base / "planar.yaml"
    cfg.write_text(SCENARIO)
    dirs = []
    for name, workers in (("a", "1"), ("b", "1"), ("c", "2")):
        assert main(["solve", "--scenario", str(cfg), "--out-dir", str(base / name),
                     "--workers", workers]) == 0
        dirs.append(base / name)
    return cfg, dirs


def test_solve_writes_all_outputs(solved):
    cfg, (a, _, _) = solved
    for name in DATA_FILES + ("manifest.json",):
        assert (a / name).is_file(), name
    man = read_manifest(a / "manifest.json")
    assert man["command"] == "solve"
    assert man["config_sha256"] == file_sha256(cfg)
    assert {o["path"] for o in man["outputs"]} == set(DATA_FILES)
    for o in man["outputs"]:
        assert o["sha256"] == file_sha256(a / o["path"])
    assert man["environment"]["kernels"] in ("python", "compiled")


@pytest.mark.parametrize("name", DATA_FILES)
def test_solve_outputs_identical_across_runs_and_workers(solved, name):
    _, dirs = solved
    blobs = {(d / name).read_bytes() for d in dirs}
    assert len(blobs) == 1


def test_pattern_command_cuts(solved, tmp_path, capsys):
    cfg, _ = solved
    out = tmp_path / "h.csv"
    code, _, _ = run(["pattern", "--scenario", str(cfg), "--freq-hz", "1.3e9", "--cut", "H",
                      "--out", str(out)], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert rows and all(float(r["theta_deg"]) == 90.0 for r in rows)
    out = tmp_path / "e.csv"
    assert main(["pattern", "--scenario", str(cfg), "--freq-hz", "1.3e9", "--cut", "E",
                 "--out", str(out)]) == 0
    phis = {float(r["phi_deg"]) for r in csv.DictReader(io.StringIO(out.read_text()))}
    assert phis == {0.0, 180.0}


def test_sweep_command_reports_failed_points(tmp_path, capsys):
    plan = tmp_path / "plan.yaml"
    plan.write_text(SCENARIO + "vary: {parameter: geometry.side, values_mm: [4, 115]}\n")
    code, out, err = run(["sweep", "--plan", str(plan), "--out-dir", str(tmp_path / "s")],
                         capsys)
    assert code == 1
    assert "geometry.side=4: error: GeometryError" in out
    assert "1 of 2 sweep points failed" in err
    assert (tmp_path / "s" / "sweep.csv").is_file()
    assert (tmp_path / "s" / "manifest.json").is_file()


def test_fixtures_check_command(capsys):
    code, out, _ = run(["fixtures", "check"], capsys)
    assert code == 0
    assert out.strip().splitlines()[-1].startswith("fixtures OK")


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "monoground.cli.main", "fab", "skin-depth",
                          "--freq-hz", "1.3e9"], capture_output=True, text=True, check=True)
    assert res.stdout.strip() == "1.83e-03 mm"
