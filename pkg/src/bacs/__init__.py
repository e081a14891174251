"""Bayesian characteristics (post-study odds) of clinical trial designs."""

from .core import (
    TABLE1_GRID,
    THRESHOLD_PRESETS,
    BacsResult,
    DesignPrior,
    EvidenceThresholds,
    OperatingCharacteristics,
    SensitivityRequirement,
    StrongDesignCheck,
    bacs_table,
    is_strong_design,
    post_study_odds,
    required_sensitivity,
)
from .errors import (
    BacsError,
    ConfigError,
    ConvergenceError,
    DegenerateCharacteristicsError,
    DomainError,
    InfeasibleDesignError,
    NoSignChangeError,
)

__version__ = "0.1.0"

__all__ = [
    "TABLE1_GRID",
    "THRESHOLD_PRESETS",
    "BacsResult",
    "DesignPrior",
    "EvidenceThresholds",
    "OperatingCharacteristics",
    "SensitivityRequirement",
    "StrongDesignCheck",
    "bacs_table",
    "is_strong_design",
    "post_study_odds",
    "required_sensitivity",
    "BacsError",
    "ConfigError",
    "ConvergenceError",
    "DegenerateCharacteristicsError",
    "DomainError",
    "InfeasibleDesignError",
    "NoSignChangeError",
]
