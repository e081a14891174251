"""Deterministic enumeration oracles."""

from __future__ import annotations

import numpy as np

from ..numerics import binomial_pmf_table, normal_quantile
from ..two_arm import TwoArmScenario

__all__ = ["chisq_power_exact"]


def chisq_power_exact(s: TwoArmScenario, n_total: int, yates: bool = False,
                      p_control: float | None = None, p_treat: float | None = None) -> float:
    """Exact rejection probability of the two-sided chi-square test.

    Sums the product binomial mass over every outcome ``(x0, x1)``.
    """
    m = n_total // 2
    pc = s.p_control if p_control is None else p_control
    pt = s.p_treat if p_treat is None else p_treat
    x0 = np.arange(m + 1, dtype=float)[:, None]
    x1 = np.arange(m + 1, dtype=float)[None, :]
    tot = x0 + x1
    big_n = 2.0 * m
    diff = np.abs(m * (x1 - x0))
    if yates:
        diff = np.maximum(diff - big_n / 2.0, 0.0)
    denom = m * m * tot * (big_n - tot)
    with np.errstate(divide="ignore", invalid="ignore"):
        chi2 = np.where(denom > 0, big_n * diff * diff / denom, 0.0)
    crit = normal_quantile(1.0 - s.alpha_two_sided / 2.0) ** 2
    w = binomial_pmf_table(m, pc)[:, None] * binomial_pmf_table(m, pt)[None, :]
    return float(np.sum(w[chi2 > crit]))
