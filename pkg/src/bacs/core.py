"""Post-study odds (BACs) of a design and the strong-design conditions.

A design prior is summarised by the pre-study odds ``r01 = P(H0) / P(H1)``.
A trial outcome with specificity ``p(-|H0)`` and sensitivity ``p(+|H1)``
updates these odds to

    r01(-) = r01 * spec / (1 - sens)          (negative outcome)
    r10(+) = (1 / r01) * sens / (1 - spec)    (positive outcome)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DegenerateCharacteristicsError, DomainError
from .numerics import check_probability

__all__ = [
    "DesignPrior",
    "OperatingCharacteristics",
    "EvidenceThresholds",
    "BacsResult",
    "StrongDesignCheck",
    "SensitivityRequirement",
    "THRESHOLD_PRESETS",
    "post_study_odds",
    "is_strong_design",
    "required_sensitivity",
    "bacs_table",
    "TABLE1_GRID",
]


@dataclass(frozen=True)
class DesignPrior:
    """Pre-study odds of H0 versus H1."""

    r01: float

    def __post_init__(self):
        if not (self.r01 > 0 and math.isfinite(self.r01)):
            raise DomainError(f"r01={self.r01} must be positive and finite")

    @property
    def r10(self) -> float:
        return 1.0 / self.r01

    @property
    def p_h0(self) -> float:
        return self.r01 / (1.0 + self.r01)

    @property
    def p_h1(self) -> float:
        return 1.0 / (1.0 + self.r01)


@dataclass(frozen=True)
class OperatingCharacteristics:
    """Specificity ``p(-|H0)`` and sensitivity ``p(+|H1)`` of a trial outcome."""

    specificity: float
    sensitivity: float

    def __post_init__(self):
        check_probability(self.specificity, "specificity")
        check_probability(self.sensitivity, "sensitivity")


@dataclass(frozen=True)
class EvidenceThresholds:
    """Required post-study odds ``(tau_n, tau_p)``."""

    tau_n: float
    tau_p: float

    def __post_init__(self):
        if not (self.tau_n > 0 and self.tau_p > 0):
            raise DomainError(f"thresholds must be positive, got ({self.tau_n}, {self.tau_p})")


THRESHOLD_PRESETS = {"confirmatory": EvidenceThresholds(4.75, 16.0)}

# Relative slack on ">= threshold" so that e.g. 0.8 / (1 - 0.95) counts as 16.
ODDS_RTOL = 1e-12


def _at_least(value: float, threshold: float) -> bool:
    return value >= threshold * (1.0 - ODDS_RTOL)


@dataclass(frozen=True)
class BacsResult:
    """Post-study odds and the likelihood ratios that produce them."""

    neg_odds: float
    pos_odds: float
    neg_lr: float
    pos_lr: float


@dataclass(frozen=True)
class StrongDesignCheck:
    strong: bool
    weak_regression_only: bool
    margins: tuple
    bacs: BacsResult


@dataclass(frozen=True)
class SensitivityRequirement:
    """Smallest sensitivity meeting both thresholds, or infeasibility.

    Attributes:
        min_sensitivity: The bound, or None when infeasible.
        feasible: False when no sensitivity below 1 reaches ``tau_p``.
        sup_pos_odds: Limit of the positive odds as sensitivity tends to 1.
    """

    min_sensitivity: float | None
    feasible: bool
    sup_pos_odds: float


def post_study_odds(prior: DesignPrior, oc: OperatingCharacteristics) -> BacsResult:
    """Compute the BACs of a design.

    Args:
        prior: Pre-study odds.
        oc: Specificity and sensitivity; both must be strictly below 1.

    Returns:
        The negative and positive post-study odds with their likelihood ratios.

    Raises:
        DegenerateCharacteristicsError: If specificity or sensitivity equals 1.
    """
    spec, sens = oc.specificity, oc.sensitivity
    if sens >= 1.0 or spec >= 1.0:
        raise DegenerateCharacteristicsError(
            f"odds undefined at specificity={spec}, sensitivity={sens}; use attained interior values"
        )
    if sens <= 0.0 or spec <= 0.0:
        raise DegenerateCharacteristicsError(
            f"odds vanish at specificity={spec}, sensitivity={sens}"
        )
    neg_lr = spec / (1.0 - sens)
    pos_lr = sens / (1.0 - spec)
    return BacsResult(
        neg_odds=prior.r01 * neg_lr,
        pos_odds=pos_lr / prior.r01,
        neg_lr=neg_lr,
        pos_lr=pos_lr,
    )


def is_strong_design(
    prior: DesignPrior, oc: OperatingCharacteristics, thresholds: EvidenceThresholds
) -> StrongDesignCheck:
    """Check whether a design prevents evidence regression at given thresholds.

    ``weak_regression_only`` reports the odds inequalities alone; ``strong``
    additionally requires each threshold to exceed both 1 and the prior odds
    in its own direction.
    """
    res = post_study_odds(prior, oc)
    meets = _at_least(res.neg_odds, thresholds.tau_n) and _at_least(res.pos_odds, thresholds.tau_p)
    above_prior = thresholds.tau_n > max(1.0, prior.r01) and thresholds.tau_p > max(1.0, prior.r10)
    return StrongDesignCheck(
        strong=bool(meets and above_prior),
        weak_regression_only=bool(meets),
        margins=(res.neg_odds - thresholds.tau_n, res.pos_odds - thresholds.tau_p),
        bacs=res,
    )


def required_sensitivity(
    prior: DesignPrior, specificity: float, thresholds: EvidenceThresholds
) -> SensitivityRequirement:
    """Smallest sensitivity for which both odds reach their thresholds.

    The negative odds need ``s >= 1 - r01 * spec / tau_n``; the positive odds
    need ``s >= tau_p * (1 - spec) * r01``. Positive odds are capped at
    ``(1/r01) / (1 - spec)`` as ``s -> 1``, so larger ``tau_p`` is infeasible.
    """
    spec = check_probability(specificity, "specificity", open_interval=True)
    sup_pos = prior.r10 / (1.0 - spec)
    s_neg = 1.0 - prior.r01 * spec / thresholds.tau_n
    s_pos = thresholds.tau_p * (1.0 - spec) * prior.r01
    s = max(s_neg, s_pos, 0.0)
    if sup_pos <= thresholds.tau_p or s >= 1.0:
        return SensitivityRequirement(None, False, sup_pos)
    return SensitivityRequirement(s, True, sup_pos)


# (r01, specificity, sensitivity); r01=None marks the prior-independent row.
TABLE1_GRID = [(None, 0.50, 0.50)] + [
    (r01, spec, sens)
    for r01 in (1.0, 0.5, 2.0)
    for spec, sens in ((0.95, 0.90), (0.95, 0.80), (0.90, 0.90), (0.80, 0.80))
]


def bacs_table(
    priors: Iterable[float | None], oc_grid: Sequence[tuple[float, float]] | None = None
) -> list[dict]:
    """Evaluate BACs over priors and operating characteristics.

    Args:
        priors: Pre-study odds values. If ``oc_grid`` is None, ``priors`` must
            instead be ``(r01, spec, sens)`` triples, as in ``TABLE1_GRID``.
        oc_grid: ``(spec, sens)`` pairs crossed with every prior.

    Returns:
        One dict per row with keys ``r01, specificity, sensitivity, neg_odds,
        pos_odds``. A row with ``r01=None`` is only allowed for the
        no-information design, whose odds equal the prior odds for every
        ``r01``; it is reported with ``neg_odds="r01"`` and ``pos_odds="1/r01"``.
    """
    if oc_grid is None:
        triples = [tuple(t) for t in priors]
    else:
        triples = [(r, s, n) for r in priors for (s, n) in oc_grid]
    if not triples:
        raise DomainError("empty evaluation grid")
    rows = []
    for r01, spec, sens in triples:
        oc = OperatingCharacteristics(spec, sens)
        if r01 is None:
            if spec != 0.5 or sens != 0.5:
                raise DomainError("a prior-free row requires specificity = sensitivity = 0.5")
            rows.append(dict(r01="any", specificity=spec, sensitivity=sens,
                             neg_odds="r01", pos_odds="1/r01"))
            continue
        res = post_study_odds(DesignPrior(r01), oc)
        rows.append(dict(r01=r01, specificity=spec, sensitivity=sens,
                         neg_odds=res.neg_odds, pos_odds=res.pos_odds))
    return rows
