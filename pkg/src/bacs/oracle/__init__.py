"""Independent Monte Carlo oracle and verdict registry."""

from .compare import Verdict, compare
from .exact import chisq_power_exact
from .simulate import (
    SimConfig,
    SimResult,
    TwoArmDesign,
    block_rng,
    run_blocks,
    simulate,
    simulate_gs_gaussian,
    simulate_gs_survival,
    simulate_simon,
    simulate_single_arm,
    simulate_two_arm,
)

__all__ = [
    "Verdict",
    "compare",
    "chisq_power_exact",
    "SimConfig",
    "SimResult",
    "TwoArmDesign",
    "block_rng",
    "run_blocks",
    "simulate",
    "simulate_gs_gaussian",
    "simulate_gs_survival",
    "simulate_simon",
    "simulate_single_arm",
    "simulate_two_arm",
]
