"""YAML scenario and sweep files.

Layout::

    geometry: {type: sphere, radius: 57.5}
    coax: {element_length: 57.5, feed_gap: 2.0}
    sweep: {start_hz: 0.8e9, stop_hz: 1.8e9, points: 51}
    mesh: {edge_mm: 12}
    output: {dir: results/sphere}
    run: {name: sphere, workers: 1}
    vary: {parameter: geometry.radius, values_mm: [28.75, 57.5], select: [bandwidth, gain]}

Only ``geometry`` is required; ``vary`` is required (and only allowed) in
sweep plans.  Unknown keys are rejected with their path and line.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from pathlib import Path

import yaml

from ..experiment.runner import FrequencyPlan, Scenario, SelectionRule, SweepPlan
from ..geometry.specs import FAMILIES, CoaxModel, GeometryError

_SECTIONS = {"geometry", "coax", "sweep", "mesh", "output", "run"}
_SWEEP_KEYS = {"start_hz": float, "stop_hz": float, "points": int}
_RUN_KEYS = {"name": str, "workers": int, "gain_at_hz": float, "auto_widen": bool}
_VARY_KEYS = {"parameter", "values_mm", "select"}


class ConfigError(ValueError):
    """Schema violation, reported with the key path and source line."""

    def __init__(self, path: str, message: str, line: int | None = None):
        self.path = path
        self.line = line
        where = f" (line {line})" if line else ""
        super().__init__(f"{path}: {message}{where}")


class _Doc:
    """Parsed YAML plus a map from key path to 1-based line number."""

    def __init__(self, text: str):
        try:
            node = yaml.compose(text, Loader=yaml.SafeLoader)
            self.data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            raise ConfigError("<document>", f"invalid YAML: {getattr(exc, 'problem', exc)}",
                              mark.line + 1 if mark else None) from None
        self.lines: dict[str, int] = {}
        if node is not None:
            self._walk(node, "")
        if self.data is None:
            self.data = {}
        if not isinstance(self.data, dict):
            raise ConfigError("<document>", "top level must be a mapping", 1)

    def _walk(self, node, prefix):
        if isinstance(node, yaml.MappingNode):
            seen = set()
            for k, v in node.value:
                path = f"{prefix}.{k.value}" if prefix else str(k.value)
                if path in seen:
                    raise ConfigError(path, "duplicate key", k.start_mark.line + 1)
                seen.add(path)
                self.lines[path] = k.start_mark.line + 1
                self._walk(v, path)

    def line(self, path: str) -> int | None:
        while path:
            if path in self.lines:
                return self.lines[path]
            path = path.rpartition(".")[0]
        return None

    def error(self, path: str, message: str) -> ConfigError:
        return ConfigError(path, message, self.line(path))

    def section(self, name: str, required: bool = False) -> dict:
        val = self.data.get(name)
        if val is None:
            if required:
                raise ConfigError(name, "missing required section")
            return {}
        if not isinstance(val, dict):
            raise self.error(name, "must be a mapping")
        return val


def _number(doc, path, value, kind=float, allow_zero=False):
    if isinstance(value, bool):
        raise doc.error(path, f"expected a number, got {value!r}")
    try:
        x = float(value)           # PyYAML reads 1.3e9 (no sign) as a string
    except (TypeError, ValueError):
        raise doc.error(path, f"expected a number, got {value!r}") from None
    if not math.isfinite(x):
        raise doc.error(path, "must be finite")
    if kind is int:
        if not x.is_integer():
            raise doc.error(path, f"expected an integer, got {value!r}")
        x = int(x)
    if x < 0 or (x == 0 and not allow_zero):
        raise doc.error(path, f"must be {'>= 0' if allow_zero else '> 0'} (got {value})")
    return x


def _unknown(doc, section, keys, allowed):
    for k in keys:
        if k not in allowed:
            raise doc.error(f"{section}.{k}" if section else str(k),
                            f"unknown key; expected one of {sorted(allowed)}")


def _field_value(doc, path, f: dataclasses.Field, value):
    default = f.default if f.default is not dataclasses.MISSING else None
    if value is None:
        if default is None and f.default is not dataclasses.MISSING:
            return None
        raise doc.error(path, "must not be null")
    if isinstance(default, tuple) or isinstance(value, list):
        if not isinstance(value, list) or not value:
            raise doc.error(path, "expected a non-empty list of numbers")
        return tuple(_number(doc, f"{path}[{i}]", v) for i, v in enumerate(value))
    kind = int if isinstance(default, int) and not isinstance(default, bool) else float
    return _number(doc, path, value, kind, allow_zero=path == "coax.feed_gap")


def _build(doc, section, cls, values, exclude=()):
    fields = {f.name: f for f in dataclasses.fields(cls) if f.name not in exclude}
    _unknown(doc, section, values, fields)
    kwargs = {k: _field_value(doc, f"{section}.{k}", fields[k], v) for k, v in values.items()}
    try:
        return cls(**kwargs)
    except GeometryError as exc:
        msg = str(exc)
        for k in kwargs:
            if f".{k} " in msg:
                raise doc.error(f"{section}.{k}", msg) from None
        raise doc.error(section, msg) from None


def _geometry(doc):
    geo = dict(doc.section("geometry", required=True))
    fam = geo.pop("type", None)
    if fam is None:
        raise doc.error("geometry.type", "missing ground-plane type")
    if fam not in FAMILIES:
        raise doc.error("geometry.type", f"unknown type {fam!r}; expected one of "
                                         f"{sorted(FAMILIES)}")
    return _build(doc, "geometry", FAMILIES[fam], geo)


def _scenario(doc: _Doc, allowed: set) -> Scenario:
    _unknown(doc, "", doc.data, allowed)
    spec = _geometry(doc)
    coax = _build(doc, "coax", CoaxModel, doc.section("coax"))
    try:
        spec.validate(coax)
    except GeometryError as exc:
        raise doc.error("geometry", str(exc)) from None

    sw = doc.section("sweep")
    _unknown(doc, "sweep", sw, _SWEEP_KEYS)
    kw = {k: _number(doc, f"sweep.{k}", v, _SWEEP_KEYS[k]) for k, v in sw.items()}
    try:
        plan = FrequencyPlan(**kw)
    except ValueError as exc:
        raise doc.error("sweep", str(exc)) from None

    mesh = doc.section("mesh")
    _unknown(doc, "mesh", mesh, {"edge_mm"})
    edge = _number(doc, "mesh.edge_mm", mesh["edge_mm"]) if "edge_mm" in mesh else 12.0

    out = doc.section("output")
    _unknown(doc, "output", out, {"dir"})
    out_dir = out.get("dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise doc.error("output.dir", "expected a path string")

    run = doc.section("run")
    _unknown(doc, "run", run, _RUN_KEYS)
    extra = {}
    for k, v in run.items():
        path = f"run.{k}"
        if _RUN_KEYS[k] is str:
            if not isinstance(v, str):
                raise doc.error(path, "expected a string")
            extra[k] = v
        elif _RUN_KEYS[k] is bool:
            if not isinstance(v, bool):
                raise doc.error(path, "expected true or false")
            extra[k] = v
        elif k == "workers":
            extra[k] = _number(doc, path, v, int, allow_zero=True)
        else:
            extra[k] = None if v is None else _number(doc, path, v)
    return Scenario(spec=spec, coax=coax, plan=plan, edge_mm=edge, output_dir=out_dir, **extra)


def parse_scenario_text(text: str) -> Scenario:
    return _scenario(_Doc(text), _SECTIONS)


def parse_sweep_text(text: str) -> SweepPlan:
    doc = _Doc(text)
    base = _scenario(doc, _SECTIONS | {"vary"})
    vary = doc.section("vary", required=True)
    _unknown(doc, "vary", vary, _VARY_KEYS)
    param = vary.get("parameter")
    if not isinstance(param, str):
        raise doc.error("vary.parameter", "expected a dotted path such as geometry.radius")
    values = vary.get("values_mm")
    if not isinstance(values, list) or len(values) < 2:
        raise doc.error("vary.values_mm", "expected a list of at least two values")
    values = [_number(doc, f"vary.values_mm[{i}]", v) for i, v in enumerate(values)]
    select = vary.get("select", list(SelectionRule().criteria))
    try:
        rule = SelectionRule(tuple(select))
    except (ValueError, TypeError) as exc:
        raise doc.error("vary.select", str(exc)) from None
    try:
        return SweepPlan(base, param, tuple(values), rule)
    except (ValueError, GeometryError) as exc:
        raise doc.error("vary.parameter", str(exc)) from None


def parse_scenario(path) -> Scenario:
    return parse_scenario_text(Path(path).read_text(encoding="utf-8"))


def parse_sweep(path) -> SweepPlan:
    return parse_sweep_text(Path(path).read_text(encoding="utf-8"))


def parse_geometry_text(text: str):
    """``(spec, coax)`` from a file holding at least a ``geometry`` section."""
    sc = parse_scenario_text(text)
    return sc.spec, sc.coax


# ----------------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------------

def _plain(v):
    return [_plain(x) for x in v] if isinstance(v, tuple) else v


def scenario_dict(sc: Scenario) -> dict:
    geo = {"type": sc.spec.family}
    geo.update({f.name: _plain(getattr(sc.spec, f.name)) for f in dataclasses.fields(sc.spec)})
    out = {
        "geometry": geo,
        "coax": {f.name: getattr(sc.coax, f.name) for f in dataclasses.fields(sc.coax)},
        "sweep": {"start_hz": sc.plan.start_hz, "stop_hz": sc.plan.stop_hz,
                  "points": int(sc.plan.points)},
        "mesh": {"edge_mm": sc.edge_mm},
    }
    if sc.output_dir is not None:
        out["output"] = {"dir": sc.output_dir}
    run = {"name": sc.name, "auto_widen": sc.auto_widen, "workers": sc.workers}
    if sc.gain_at_hz is not None:
        run["gain_at_hz"] = sc.gain_at_hz
    out["run"] = run
    return out


def serialize_scenario(sc: Scenario) -> str:
    return yaml.safe_dump(scenario_dict(sc), sort_keys=False)


def serialize_sweep(plan: SweepPlan) -> str:
    d = scenario_dict(plan.base)
    d["vary"] = {"parameter": plan.parameter, "values_mm": list(plan.values),
                 "select": list(plan.rule.criteria)}
    return yaml.safe_dump(d, sort_keys=False)


def config_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
