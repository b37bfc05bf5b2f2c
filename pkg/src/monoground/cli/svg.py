"""Self-contained SVG 1.1 plots: polar patterns in dB and S11 curves."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass

import numpy as np

DB_FLOOR = -80.0
COLORS = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
DASHES = ("", "6,4", "2,3", "8,3,2,3")
SVG_NS = "http://www.w3.org/2000/svg"


@dataclass(frozen=True)
class PolarTraceData:
    label: str
    angle_deg: np.ndarray
    value_db: np.ndarray


@dataclass(frozen=True)
class PolarPlotSpec:
    """Traces on a polar dB grid, 0 deg at the top, angles increasing clockwise."""

    traces: tuple
    db_min: float = -40.0
    db_max: float = 0.0
    ring_step_db: float = 10.0
    title: str = ""
    size: int = 480

    def __post_init__(self):
        if not self.traces:
            raise ValueError("a polar plot needs at least one trace")
        if not self.db_min < self.db_max:
            raise ValueError("dB range must satisfy min < max")


def _root(width, height):
    ET.register_namespace("", SVG_NS)
    return ET.Element("svg", {
        "xmlns": SVG_NS, "version": "1.1", "width": str(width), "height": str(height),
        "viewBox": f"0 0 {width} {height}", "font-family": "sans-serif", "font-size": "11"})


def _fmt(x) -> str:
    return f"{x:.2f}"


def _bytes(root) -> bytes:
    ET.indent(root)
    body = ET.tostring(root, encoding="unicode")
    return ('<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n' + body + "\n").encode()


def emit_polar_svg(spec: PolarPlotSpec) -> bytes:
    """Render ``spec`` as SVG bytes.

    Values are clamped at -80 dB and then to the plot range, so nulls sit
    on the centre point.
    """
    legend_h = 18 * len(spec.traces) + 10
    top = 30 if spec.title else 10
    w = spec.size
    h = spec.size + top + legend_h
    cx, cy = w / 2, top + spec.size / 2
    radius = spec.size / 2 - 34
    root = _root(w, h)
    ET.SubElement(root, "rect", {"x": "0", "y": "0", "width": str(w), "height": str(h),
                                 "fill": "white"})
    if spec.title:
        t = ET.SubElement(root, "text", {"x": _fmt(cx), "y": "20", "text-anchor": "middle",
                                         "font-size": "14"})
        t.text = spec.title

    def rad(v):
        v = np.clip(v, spec.db_min, spec.db_max)
        return radius * (v - spec.db_min) / (spec.db_max - spec.db_min)

    grid = ET.SubElement(root, "g", {"stroke": "#bbbbbb", "fill": "none",
                                     "stroke-width": "0.8"})
    levels = np.arange(spec.db_max, spec.db_min - 1e-9, -spec.ring_step_db)
    for lv in levels:
        ET.SubElement(grid, "circle", {"cx": _fmt(cx), "cy": _fmt(cy), "r": _fmt(rad(lv))})
    for a in range(0, 360, 30):
        s, c = np.sin(np.radians(a)), np.cos(np.radians(a))
        ET.SubElement(grid, "line", {"x1": _fmt(cx), "y1": _fmt(cy),
                                     "x2": _fmt(cx + radius * s), "y2": _fmt(cy - radius * c)})
        lab = ET.SubElement(root, "text", {
            "x": _fmt(cx + (radius + 16) * s), "y": _fmt(cy - (radius + 16) * c + 4),
            "text-anchor": "middle", "fill": "#444444"})
        lab.text = f"{a}°"
    for lv in levels:
        lab = ET.SubElement(root, "text", {"x": _fmt(cx + 3), "y": _fmt(cy - rad(lv) - 2),
                                           "fill": "#666666", "font-size": "9"})
        lab.text = f"{lv:g} dB"

    for i, tr in enumerate(spec.traces):
        ang = np.asarray(tr.angle_deg, float)
        val = np.maximum(np.asarray(tr.value_db, float), DB_FLOOR)
        if ang.size == 0 or ang.shape != val.shape:
            raise ValueError(f"trace {tr.label!r} is empty or has mismatched arrays")
        if not np.all(np.isfinite(val)) or not np.all(np.isfinite(ang)):
            raise ValueError(f"trace {tr.label!r} has non-finite samples")
        r = rad(val)
        x = cx + r * np.sin(np.radians(ang))
        y = cy - r * np.cos(np.radians(ang))
        d = "M " + " L ".join(f"{_fmt(a)} {_fmt(b)}" for a, b in zip(x, y)) + " Z"
        attrs = {"d": d, "fill": "none", "stroke": COLORS[i % len(COLORS)],
                 "stroke-width": "1.8"}
        dash = DASHES[i % len(DASHES)]
        if dash:
            attrs["stroke-dasharray"] = dash
        ET.SubElement(root, "path", attrs)

    ly = top + spec.size + 8
    for i, tr in enumerate(spec.traces):
        y = ly + 18 * i
        attrs = {"x1": "20", "y1": _fmt(y + 6), "x2": "50", "y2": _fmt(y + 6),
                 "stroke": COLORS[i % len(COLORS)], "stroke-width": "2"}
        if DASHES[i % len(DASHES)]:
            attrs["stroke-dasharray"] = DASHES[i % len(DASHES)]
        ET.SubElement(root, "line", attrs)
        t = ET.SubElement(root, "text", {"x": "58", "y": _fmt(y + 10)})
        t.text = tr.label
    return _bytes(root)


def emit_s11_svg(frequencies_hz, s11_db, label: str = "S11", db_min: float = -40.0,
                 width: int = 560, height: int = 340) -> bytes:
    """S11 (dB) against frequency (GHz) with the -10 dB line marked."""
    f = np.asarray(frequencies_hz, float) / 1e9
    s = np.clip(np.asarray(s11_db, float), db_min, 0.0)
    if f.size < 2 or f.shape != s.shape:
        raise ValueError("S11 curve needs at least two samples")
    m = {"l": 56, "r": 16, "t": 16, "b": 40}
    pw, ph = width - m["l"] - m["r"], height - m["t"] - m["b"]

    def px(v):
        return m["l"] + pw * (v - f[0]) / (f[-1] - f[0])

    def py(v):
        return m["t"] + ph * (0.0 - v) / (0.0 - db_min)

    root = _root(width, height)
    ET.SubElement(root, "rect", {"x": "0", "y": "0", "width": str(width),
                                 "height": str(height), "fill": "white"})
    g = ET.SubElement(root, "g", {"stroke": "#cccccc", "stroke-width": "0.8"})
    for lv in np.arange(0, db_min - 1e-9, -10):
        ET.SubElement(g, "line", {"x1": _fmt(m["l"]), "x2": _fmt(m["l"] + pw),
                                  "y1": _fmt(py(lv)), "y2": _fmt(py(lv))})
        t = ET.SubElement(root, "text", {"x": _fmt(m["l"] - 6), "y": _fmt(py(lv) + 4),
                                         "text-anchor": "end"})
        t.text = f"{lv:g}"
    for fv in np.linspace(f[0], f[-1], 6):
        t = ET.SubElement(root, "text", {"x": _fmt(px(fv)), "y": _fmt(height - 22),
                                         "text-anchor": "middle"})
        t.text = f"{fv:.2f}"
    ET.SubElement(root, "line", {"x1": _fmt(m["l"]), "x2": _fmt(m["l"] + pw),
                                 "y1": _fmt(py(-10)), "y2": _fmt(py(-10)),
                                 "stroke": "#888888", "stroke-dasharray": "4,3"})
    xl = ET.SubElement(root, "text", {"x": _fmt(m["l"] + pw / 2), "y": _fmt(height - 6),
                                      "text-anchor": "middle"})
    xl.text = "frequency (GHz)"
    d = "M " + " L ".join(f"{_fmt(px(a))} {_fmt(py(b))}" for a, b in zip(f, s))
    ET.SubElement(root, "path", {"d": d, "fill": "none", "stroke": COLORS[0],
                                 "stroke-width": "1.8"})
    t = ET.SubElement(root, "text", {"x": _fmt(m["l"] + 8), "y": _fmt(m["t"] + 14)})
    t.text = f"{label} (dB)"
    return _bytes(root)
