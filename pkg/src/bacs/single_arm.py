"""Single-arm, single-analysis binomial designs and their minimum size for BACs.

Two power methods are available:

* ``"exact"``: one-sided exact binomial test; the critical count is the
  smallest ``k`` with ``P(X >= k | p0) <= alpha``.
* ``"arcsine"``: two-sided normal approximation on the variance-stabilised
  scale ``2 asin(sqrt(p))``, giving the smooth power curve
  ``Phi(h sqrt(n) - z) + Phi(-h sqrt(n) - z)`` with ``z = z_{1 - alpha/2}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .core import (
    BacsResult,
    DesignPrior,
    EvidenceThresholds,
    OperatingCharacteristics,
    is_strong_design,
    post_study_odds,
    required_sensitivity,
)
from .errors import DegenerateCharacteristicsError, DomainError, InfeasibleDesignError
from .numerics import binomial_pmf_table, check_probability, normal_cdf, normal_quantile

__all__ = [
    "SingleArmDesign",
    "MinNResult",
    "design_single_arm",
    "arcsine_power",
    "design_bacs",
    "min_n_for_bacs",
]

METHODS = ("exact", "arcsine")
MODES = ("nominal", "attained")


@dataclass(frozen=True)
class SingleArmDesign:
    """Single-analysis design at sample size ``n``.

    Attributes:
        critical_k: Reject H0 when responses ``>= critical_k``. For the
            arcsine method this is the upper critical count of the
            approximate test and is informational only.
        attained_spec: ``1 - P(reject | p0)``; nominal ``1 - alpha`` for the
            arcsine method.
        attained_sens: ``P(reject | p1)``.
    """

    n: int
    critical_k: int
    attained_spec: float
    attained_sens: float
    alpha: float
    method: str = "exact"


@dataclass(frozen=True)
class MinNResult:
    n: int
    design: SingleArmDesign
    bacs: BacsResult
    trajectory: list = field(default_factory=list)


def _validate(p0, p1, alpha):
    p0 = check_probability(p0, "p0", open_interval=True)
    p1 = check_probability(p1, "p1", open_interval=True)
    alpha = check_probability(alpha, "alpha", open_interval=True)
    if not p0 < p1:
        raise DomainError(f"need p0 < p1, got {p0}, {p1}")
    return p0, p1, alpha


def arcsine_power(p0: float, p1: float, alpha: float, n: int) -> float:
    """Two-sided arcsine-approximation power of the one-sample binomial test."""
    p0, p1, alpha = _validate(p0, p1, alpha)
    h = 2.0 * math.asin(math.sqrt(p1)) - 2.0 * math.asin(math.sqrt(p0))
    z = normal_quantile(1.0 - alpha / 2.0)
    s = h * math.sqrt(n)
    return normal_cdf(s - z) + normal_cdf(-s - z)


def design_single_arm(p0: float, p1: float, alpha: float, n: int, method: str = "exact") -> SingleArmDesign:
    """Critical value and operating characteristics at sample size ``n``.

    Raises:
        DegenerateCharacteristicsError: If no cutoff reaches ``alpha`` (exact).
    """
    p0, p1, alpha = _validate(p0, p1, alpha)
    if n < 1 or int(n) != n:
        raise DomainError(f"n={n} must be a positive integer")
    n = int(n)
    if method == "exact":
        tail0 = np.cumsum(binomial_pmf_table(n, p0)[::-1])[::-1]  # P(X >= k), k=0..n
        ok = np.nonzero(tail0 <= alpha)[0]
        if ok.size == 0:
            raise DegenerateCharacteristicsError(f"alpha={alpha} unattainable at n={n}")
        k = int(ok[0])
        tail1 = np.cumsum(binomial_pmf_table(n, p1)[::-1])[::-1]
        return SingleArmDesign(n, k, float(1.0 - tail0[k]), float(min(tail1[k], 1.0)), alpha, method)
    if method == "arcsine":
        z = normal_quantile(1.0 - alpha / 2.0)
        target = math.asin(math.sqrt(p0)) + z / (2.0 * math.sqrt(n))
        k = n + 1 if target >= math.pi / 2 else math.floor(n * math.sin(target) ** 2) + 1
        return SingleArmDesign(n, int(k), 1.0 - alpha, arcsine_power(p0, p1, alpha, n), alpha, method)
    raise DomainError(f"unknown method {method!r}; expected one of {METHODS}")


def _oc(design: SingleArmDesign, mode: str) -> OperatingCharacteristics:
    if mode == "nominal":
        return OperatingCharacteristics(1.0 - design.alpha, design.attained_sens)
    if mode == "attained":
        return OperatingCharacteristics(design.attained_spec, design.attained_sens)
    raise DomainError(f"unknown mode {mode!r}; expected one of {MODES}")


def design_bacs(design: SingleArmDesign, prior: DesignPrior, mode: str = "nominal") -> BacsResult:
    """BACs of a single-arm design (nominal specificity by default)."""
    return post_study_odds(prior, _oc(design, mode))


def min_n_for_bacs(
    p0: float,
    p1: float,
    alpha: float,
    prior: DesignPrior,
    thresholds: EvidenceThresholds,
    n_range: Iterable[int],
    method: str = "exact",
    mode: str = "nominal",
) -> MinNResult:
    """Smallest ``n`` in ``n_range`` whose design is a strong BACs design.

    The scan is upward over ``n_range`` and records the whole trajectory
    ``(n, sens, neg_odds, pos_odds, strong)``.

    Raises:
        InfeasibleDesignError: If the thresholds cannot be met at the
            specificity in use, or no ``n`` in range meets them. The error
            details carry the best margins seen.
    """
    p0, p1, alpha = _validate(p0, p1, alpha)
    ns = sorted(int(n) for n in n_range)
    if not ns:
        raise DomainError("empty n_range")
    if mode == "nominal":
        req = required_sensitivity(prior, 1.0 - alpha, thresholds)
        if not req.feasible:
            raise InfeasibleDesignError(
                f"tau_p={thresholds.tau_p} exceeds the positive-odds bound {req.sup_pos_odds:.4g}",
                details={"sup_pos_odds": req.sup_pos_odds},
            )
    trajectory = []
    best = None
    for n in ns:
        d = design_single_arm(p0, p1, alpha, n, method)
        chk = is_strong_design(prior, _oc(d, mode), thresholds)
        trajectory.append(dict(n=n, sensitivity=d.attained_sens, neg_odds=chk.bacs.neg_odds,
                               pos_odds=chk.bacs.pos_odds, strong=chk.strong))
        if chk.strong:
            return MinNResult(n, d, chk.bacs, trajectory)
        score = min(chk.margins)
        if best is None or score > best[0]:
            best = (score, n, chk.margins)
    raise InfeasibleDesignError(
        f"no n in [{ns[0]}, {ns[-1]}] meets the thresholds; best margins {best[2]} at n={best[1]}",
        details={"best_n": best[1], "best_margins": best[2], "trajectory": trajectory},
    )
