"""Command line, configuration files, run manifests and plot emission."""

from .config import (ConfigError, config_hash, parse_scenario, parse_scenario_text, parse_sweep,
                     parse_sweep_text, serialize_scenario, serialize_sweep)
from .svg import PolarPlotSpec, PolarTraceData, emit_polar_svg, emit_s11_svg

__all__ = [
    "ConfigError", "PolarPlotSpec", "PolarTraceData", "config_hash", "emit_polar_svg",
    "emit_s11_svg", "parse_scenario", "parse_scenario_text", "parse_sweep", "parse_sweep_text",
    "serialize_scenario", "serialize_sweep",
]
