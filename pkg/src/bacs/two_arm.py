"""Randomised 1:1 two-arm binary-endpoint designs analysed by chi-square test."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .core import (
    BacsResult,
    DesignPrior,
    EvidenceThresholds,
    OperatingCharacteristics,
    is_strong_design,
    post_study_odds,
    required_sensitivity,
)
from .errors import DomainError, InfeasibleDesignError
from .numerics import check_probability, normal_cdf, normal_quantile

__all__ = [
    "TwoArmScenario",
    "PowerEstimate",
    "EvidencePoint",
    "TwoArmMinN",
    "power_two_proportion",
    "evidence_curve",
    "min_n_for_bacs",
]


@dataclass(frozen=True)
class TwoArmScenario:
    p_control: float
    p_treat: float
    alpha_two_sided: float = 0.05

    def __post_init__(self):
        check_probability(self.p_control, "p_control", open_interval=True)
        check_probability(self.p_treat, "p_treat", open_interval=True)
        check_probability(self.alpha_two_sided, "alpha_two_sided", open_interval=True)
        if self.p_control == self.p_treat:
            raise DomainError("p_control and p_treat must differ")


@dataclass(frozen=True)
class PowerEstimate:
    """Power with its Monte Carlo standard error (0 for analytic methods)."""

    power: float
    se: float = 0.0
    method: str = "normal_approx"


@dataclass(frozen=True)
class EvidencePoint:
    n: int
    power: float
    neg_odds: float
    pos_odds: float


@dataclass(frozen=True)
class TwoArmMinN:
    n_total: int
    power: float
    bacs: BacsResult
    trajectory: list = field(default_factory=list)


def _check_n(n_total):
    if n_total < 2 or int(n_total) != n_total or n_total % 2:
        raise DomainError(f"n_total={n_total} must be a positive even integer (1:1 allocation)")
    return int(n_total)


def _normal_power(s: TwoArmScenario, n_total: int) -> float:
    m = n_total / 2.0
    p0, p1 = s.p_control, s.p_treat
    pbar = 0.5 * (p0 + p1)
    se0 = math.sqrt(2.0 * pbar * (1.0 - pbar) / m)
    se1 = math.sqrt((p0 * (1.0 - p0) + p1 * (1.0 - p1)) / m)
    z = normal_quantile(1.0 - s.alpha_two_sided / 2.0)
    d = abs(p1 - p0)
    return normal_cdf((d - z * se0) / se1) + normal_cdf((-d - z * se0) / se1)


def power_two_proportion(
    s: TwoArmScenario,
    n_total: int,
    method: str = "normal_approx",
    seed: int | None = None,
    reps: int = 1_000_000,
    yates: bool = False,
) -> PowerEstimate:
    """Power of the two-sided chi-square test at total size ``n_total``.

    Args:
        s: Scenario.
        n_total: Total subjects, split evenly.
        method: ``"normal_approx"`` (pooled-variance z, equivalent to the
            uncorrected chi-square) or ``"simulated_chisq"``.
        seed: Required for ``"simulated_chisq"``.
        reps: Monte Carlo replicates.
        yates: Apply the continuity correction in the simulated test.
    """
    n_total = _check_n(n_total)
    if method == "normal_approx":
        if yates:
            raise DomainError("the continuity correction is only available for simulated_chisq")
        return PowerEstimate(_normal_power(s, n_total), 0.0, method)
    if method == "simulated_chisq":
        if seed is None:
            raise DomainError("simulated_chisq requires a seed")
        from .oracle.simulate import simulate_two_arm

        res = simulate_two_arm(s, n_total, seed=seed, reps=reps, yates=yates)
        return PowerEstimate(res.positive_rate, res.se, method)
    raise DomainError(f"unknown method {method!r}")


def evidence_curve(s: TwoArmScenario, prior: DesignPrior, n_grid: Iterable[int]) -> list[EvidencePoint]:
    """BACs at specificity ``1 - alpha`` along a grid of total sizes."""
    out = []
    for n in n_grid:
        pw = _normal_power(s, _check_n(n))
        res = post_study_odds(prior, OperatingCharacteristics(1.0 - s.alpha_two_sided, pw))
        out.append(EvidencePoint(int(n), pw, res.neg_odds, res.pos_odds))
    if not out:
        raise DomainError("empty n_grid")
    return out


def min_n_for_bacs(
    s: TwoArmScenario,
    prior: DesignPrior,
    thresholds: EvidenceThresholds,
    n_range: Iterable[int],
) -> TwoArmMinN:
    """Smallest total size on ``n_range`` giving a strong BACs design.

    Raises:
        InfeasibleDesignError: If ``tau_p`` exceeds the bound ``(1/r01)/alpha``
            or no size in range suffices.
    """
    ns = sorted(_check_n(n) for n in n_range)
    if not ns:
        raise DomainError("empty n_range")
    spec = 1.0 - s.alpha_two_sided
    req = required_sensitivity(prior, spec, thresholds)
    if not req.feasible:
        raise InfeasibleDesignError(
            f"tau_p={thresholds.tau_p} exceeds the positive-odds bound {req.sup_pos_odds:.4g}",
            details={"sup_pos_odds": req.sup_pos_odds},
        )
    trajectory = []
    for n in ns:
        pw = _normal_power(s, n)
        chk = is_strong_design(prior, OperatingCharacteristics(spec, pw), thresholds)
        trajectory.append(dict(n=n, power=pw, neg_odds=chk.bacs.neg_odds,
                               pos_odds=chk.bacs.pos_odds, strong=chk.strong))
        if chk.strong:
            return TwoArmMinN(n, pw, chk.bacs, trajectory)
    last = trajectory[-1]
    raise InfeasibleDesignError(
        f"no n in [{ns[0]}, {ns[-1]}] meets the thresholds (power {last['power']:.3f} at n={ns[-1]})",
        details={"trajectory": trajectory},
    )
