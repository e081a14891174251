"""Group-sequential time-to-event design engine."""

from .accrual import SubjectCount, SurvivalScenario, lachin_foulkes_events, subjects_for_events
from .design import (
    FutilityResult,
    GSDesign,
    GSPower,
    StageReport,
    beta_spending_futility,
    design_gs,
    fixed_design_report,
    futility_analysis,
    gs_power,
    hr_to_z,
    required_max_events,
    schoenfeld_events,
    schoenfeld_events_continuous,
    solve_boundaries,
    solve_drift,
    stage_bacs,
    z_to_hr,
)
from .recursion import Propagator, crossing_probabilities
from .spending import FAMILIES, SpendingFunction, lan_demets, spending_value

__all__ = [
    "FAMILIES",
    "FutilityResult",
    "GSDesign",
    "GSPower",
    "Propagator",
    "StageReport",
    "SubjectCount",
    "SurvivalScenario",
    "SpendingFunction",
    "beta_spending_futility",
    "crossing_probabilities",
    "design_gs",
    "fixed_design_report",
    "futility_analysis",
    "gs_power",
    "hr_to_z",
    "lachin_foulkes_events",
    "lan_demets",
    "required_max_events",
    "schoenfeld_events",
    "schoenfeld_events_continuous",
    "solve_boundaries",
    "solve_drift",
    "spending_value",
    "stage_bacs",
    "subjects_for_events",
    "z_to_hr",
]
