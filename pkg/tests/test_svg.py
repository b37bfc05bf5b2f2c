import math
import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from monoground.analytic import pattern_from_kh
from monoground.cli import PolarPlotSpec, PolarTraceData, emit_polar_svg, emit_s11_svg

NS = {"s": "http://www.w3.org/2000/svg"}


def parse(data: bytes):
    assert data.startswith(b"<?xml")
    return ET.fromstring(data)


def path_points(path_el):
    nums = [float(x) for x in re.findall(r"-?\d+\.\d+", path_el.get("d"))]
    return np.array(nums).reshape(-1, 2)


def test_polar_svg_is_self_contained_xml():
    ang = np.arange(0, 360, 5.0)
    data = emit_polar_svg(PolarPlotSpec((PolarTraceData("a", ang, -10 * np.abs(np.sin(
        np.radians(ang)))),), title="t"))
    root = parse(data)
    assert root.tag == "{http://www.w3.org/2000/svg}svg" and root.get("version") == "1.1"
    text = data.decode()
    assert "href" not in text and "<image" not in text and "url(" not in text
    labels = [t.text for t in root.iter("{http://www.w3.org/2000/svg}text")]
    assert "0 dB" in labels and "-40 dB" in labels and "90°" in labels


def test_constant_zero_db_trace_is_outer_circle():
    ang = np.arange(0, 360, 10.0)
    root = parse(emit_polar_svg(PolarPlotSpec((PolarTraceData("iso", ang, np.zeros_like(ang)),))))
    outer = max(root.findall(".//s:circle", NS), key=lambda c: float(c.get("r")))
    cx, cy, r = (float(outer.get(k)) for k in ("cx", "cy", "r"))
    pts = path_points(root.find("s:path", NS))
    assert len(pts) == len(ang)
    assert np.allclose(np.hypot(pts[:, 0] - cx, pts[:, 1] - cy), r, atol=0.01)
    # 0 deg at the top, 90 deg to the right
    assert np.allclose(pts[0], [cx, cy - r], atol=0.01)
    assert np.allclose(pts[9], [cx + r, cy], atol=0.01)


def test_nulls_clamp_to_centre():
    ang = np.array([0.0, 90.0, 180.0])
    root = parse(emit_polar_svg(PolarPlotSpec((PolarTraceData("n", ang,
                                                               np.array([-200.0, 0, -50])),))))
    c = root.find(".//s:circle", NS)
    pts = path_points(root.find("s:path", NS))
    assert np.allclose(pts[0], [float(c.get("cx")), float(c.get("cy"))], atol=0.01)


def test_two_traces_get_distinct_styles():
    ang = np.arange(0, 360, 30.0)
    spec = PolarPlotSpec((PolarTraceData("E", ang, 0 * ang), PolarTraceData("H", ang, 0 * ang - 3)))
    paths = parse(emit_polar_svg(spec)).findall("s:path", NS)
    assert len(paths) == 2
    assert paths[0].get("stroke") != paths[1].get("stroke")
    assert paths[1].get("stroke-dasharray")


@pytest.mark.parametrize("ang, val", [([], []), ([0.0, 1.0], [0.0]), ([0.0], [math.nan])])
def test_bad_traces_raise(ang, val):
    with pytest.raises(ValueError):
        emit_polar_svg(PolarPlotSpec((PolarTraceData("x", np.array(ang), np.array(val)),)))


def test_spec_validation():
    with pytest.raises(ValueError):
        PolarPlotSpec(())
    with pytest.raises(ValueError):
        PolarPlotSpec((PolarTraceData("x", np.zeros(1), np.zeros(1)),), db_min=0, db_max=-10)


def test_quarter_wave_figure_peaks_at_horizon():
    theta = np.radians(np.arange(0, 181, 1.0))
    db = pattern_from_kh(math.pi / 2, theta).clamped_db()
    root = parse(emit_polar_svg(PolarPlotSpec((PolarTraceData("kh", np.degrees(theta), db),))))
    c = root.find(".//s:circle", NS)
    cx, cy = float(c.get("cx")), float(c.get("cy"))
    pts = path_points(root.find("s:path", NS))
    r = np.hypot(pts[:, 0] - cx, pts[:, 1] - cy)
    assert np.argmax(r) == 90


def test_s11_plot():
    f = np.linspace(1e9, 1.6e9, 31)
    s = -20 + 40 * (f / 1e9 - 1.3) ** 2
    root = parse(emit_s11_svg(f, s, label="planar"))
    dashed = [e for e in root.iter("{http://www.w3.org/2000/svg}line")
              if e.get("stroke-dasharray")]
    assert len(dashed) == 1
    assert len(path_points(root.find("s:path", NS))) == len(f)
    with pytest.raises(ValueError):
        emit_s11_svg([1e9], [-3.0])
