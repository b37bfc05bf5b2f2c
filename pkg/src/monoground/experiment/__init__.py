"""Scenarios, parameter sweeps and the published reference tables."""

from .runner import (CONE_STOP_HZ, NOT_RESONANT, PATTERN_COLUMNS, RESPONSE_COLUMNS, ROW_COLUMNS,
                     FrequencyPlan, PairOutcome, ResultRow, Scenario, ScenarioError,
                     ScenarioResult, SelectionRule, SweepPlan, SweepResult, TrendReport,
                     pattern_at, pattern_csv, response_csv, rows_csv, run_scenario, run_sweep,
                     select_best, trend_check)

__all__ = [
    "CONE_STOP_HZ", "FrequencyPlan", "NOT_RESONANT", "PATTERN_COLUMNS", "PairOutcome",
    "RESPONSE_COLUMNS", "ROW_COLUMNS", "ResultRow", "Scenario", "ScenarioError",
    "ScenarioResult", "SelectionRule", "SweepPlan", "SweepResult", "TrendReport",
    "pattern_at", "pattern_csv", "response_csv", "rows_csv", "run_scenario", "run_sweep",
    "select_best", "trend_check",
]
