"""Scenario files, sweeps and report emission."""

from .reports import build_manifest, emit_reports, leveling_report
from .scenario import Scenario, ScenarioError, default_scenario, dump_scenario, load_scenario, parse_scenario
from .sweep import PathRecord, SeriesPoint, SlotRecord, SweepResult, run_slot, run_sweep

__all__ = [
    "Scenario", "ScenarioError", "load_scenario", "parse_scenario", "default_scenario", "dump_scenario",
    "SweepResult", "PathRecord", "SlotRecord", "SeriesPoint", "run_sweep", "run_slot",
    "emit_reports", "build_manifest", "leveling_report",
]
