"""Design priors from phase-I binomial response data.

A Beta prior on the response rate is updated with phase-I counts; the
pre-study odds of the point hypotheses ``ORR = URR`` and ``ORR = TRR`` are
taken as the posterior density ratio ``f(URR) / f(TRR)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DesignPrior
from .errors import DomainError
from .numerics import beta_log_density, beta_quantile, check_probability

__all__ = [
    "PhaseOneData",
    "BetaPosterior",
    "RateHypotheses",
    "PosteriorSummary",
    "posterior_from_binomial",
    "posterior_summaries",
    "density_ratio_odds",
    "suggest_trr",
    "density_curve",
]


@dataclass(frozen=True)
class PhaseOneData:
    n: int
    responders: int

    def __post_init__(self):
        if self.n < 1 or int(self.n) != self.n:
            raise DomainError(f"n={self.n} must be a positive integer")
        if not 0 <= self.responders <= self.n or int(self.responders) != self.responders:
            raise DomainError(f"responders={self.responders} must be an integer in [0, n]")


@dataclass(frozen=True)
class BetaPosterior:
    a: float
    b: float

    def __post_init__(self):
        ok = self.a > 0 and self.b > 0 and math.isfinite(self.a) and math.isfinite(self.b)
        if not ok:
            raise DomainError(f"Beta parameters must be finite and positive, got ({self.a}, {self.b})")


@dataclass(frozen=True)
class RateHypotheses:
    """Unacceptable (``urr``) and target (``trr``) response rates."""

    urr: float
    trr: float

    def __post_init__(self):
        check_probability(self.urr, "urr", open_interval=True)
        check_probability(self.trr, "trr", open_interval=True)
        if self.urr == self.trr:
            raise DomainError("urr and trr must differ")


@dataclass(frozen=True)
class PosteriorSummary:
    """Location summaries and an equal-tails credible interval.

    ``mode`` is None when undefined (``a <= 1`` or ``b <= 1``).
    """

    mean: float
    median: float
    mode: float | None
    ci_lo: float
    ci_hi: float
    ci_level: float

    @property
    def mode_defined(self) -> bool:
        return self.mode is not None


def posterior_from_binomial(prior: BetaPosterior, data: PhaseOneData) -> BetaPosterior:
    """Conjugate Beta update with ``responders`` successes out of ``n``."""
    return BetaPosterior(prior.a + data.responders, prior.b + data.n - data.responders)


def posterior_summaries(post: BetaPosterior, ci_level: float = 0.95) -> PosteriorSummary:
    """Mean, median, mode and equal-tails interval of a Beta posterior."""
    ci_level = check_probability(ci_level, "ci_level", open_interval=True)
    a, b = post.a, post.b
    mode = (a - 1.0) / (a + b - 2.0) if a > 1 and b > 1 else None
    tail = (1.0 - ci_level) / 2.0
    return PosteriorSummary(
        mean=a / (a + b),
        median=beta_quantile(0.5, a, b),
        mode=mode,
        ci_lo=beta_quantile(tail, a, b),
        ci_hi=beta_quantile(1.0 - tail, a, b),
        ci_level=ci_level,
    )


def density_ratio_odds(post: BetaPosterior, hyp: RateHypotheses) -> DesignPrior:
    """Pre-study odds ``r01 = f(urr) / f(trr)`` under the posterior density."""
    log_r = beta_log_density(hyp.urr, post.a, post.b) - beta_log_density(hyp.trr, post.a, post.b)
    return DesignPrior(math.exp(log_r))


def suggest_trr(post: BetaPosterior) -> tuple[float, PosteriorSummary]:
    """Most conservative target rate among mean, median and mode.

    Returns:
        The smallest of the three summaries, together with all of them.

    Raises:
        DomainError: If the mode is undefined.
    """
    s = posterior_summaries(post)
    if s.mode is None:
        raise DomainError(f"mode of Beta({post.a}, {post.b}) is undefined")
    return min(s.mean, s.median, s.mode), s


def density_curve(post: BetaPosterior, n_points: int = 201) -> list[dict]:
    """Posterior density on an even grid over (0, 1), for external plotting."""
    xs = np.linspace(0.0, 1.0, n_points)
    rows = []
    for x in xs:
        try:
            fx = math.exp(beta_log_density(float(x), post.a, post.b))
        except DomainError:
            fx = math.inf
        rows.append({"x": float(x), "density": fx})
    return rows
