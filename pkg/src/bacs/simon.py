"""Simon two-stage single-arm designs: exact evaluation and optimal search.

Convention: stop for futility after stage 1 if responses ``<= r1``; reject
H0 at the end if total responses ``> rf``. No early efficacy stop.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import BacsResult, DesignPrior, OperatingCharacteristics, post_study_odds
from .errors import DomainError, InfeasibleDesignError
from .numerics import binomial_pmf_table, binomial_sf, check_probability

__all__ = [
    "SimonDesign",
    "SimonProperties",
    "SimonResult",
    "SearchResult",
    "evaluate_design",
    "search_optimal",
    "simon_bacs",
]


@dataclass(frozen=True)
class SimonDesign:
    n1: int
    r1: int
    nf: int
    rf: int

    def __post_init__(self):
        if not 1 <= self.n1 < self.nf:
            raise DomainError(f"need 1 <= n1 < nf, got n1={self.n1}, nf={self.nf}")
        if not 0 <= self.r1 <= self.n1:
            raise DomainError(f"need 0 <= r1 <= n1, got r1={self.r1}")
        if not self.r1 <= self.rf <= self.nf:
            raise DomainError(f"need r1 <= rf <= nf, got rf={self.rf}")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n1, self.r1, self.nf, self.rf)


@dataclass(frozen=True)
class SimonProperties:
    """Exact operating characteristics of a Simon design.

    Attributes:
        attained_alpha: Rejection probability at ``p0``.
        attained_power: Rejection probability at ``p1``.
        pet0: Probability of early termination at ``p0``.
        en0: Expected sample size at ``p0``.
        pet1: Probability of early termination at ``p1``.
        en1: Expected sample size at ``p1``.
    """

    attained_alpha: float
    attained_power: float
    pet0: float
    en0: float
    pet1: float
    en1: float


@dataclass(frozen=True)
class SimonResult:
    design: SimonDesign
    properties: SimonProperties


@dataclass(frozen=True)
class SearchResult:
    optimal: SimonResult
    minimax: SimonResult


def _reject_prob(d: SimonDesign, p: float) -> float:
    n2 = d.nf - d.n1
    pmf1 = binomial_pmf_table(d.n1, p)
    total = 0.0
    for x in range(d.r1 + 1, d.n1 + 1):
        total += pmf1[x] * binomial_sf(d.rf - x + 1, n2, p)
    return float(total)


def _pet(d: SimonDesign, p: float) -> float:
    return min(1.0, float(np.sum(binomial_pmf_table(d.n1, p)[: d.r1 + 1])))


def evaluate_design(d: SimonDesign, p0: float, p1: float) -> SimonProperties:
    """Exact error rates, PET and expected sample size of a design.

    Examples:
        >>> props = evaluate_design(SimonDesign(21, 2, 66, 10), 0.10, 0.22)
        >>> round(props.pet0, 3), round(props.en0, 1)
        (0.648, 36.8)
    """
    p0 = check_probability(p0, "p0", open_interval=True)
    p1 = check_probability(p1, "p1", open_interval=True)
    if not p0 < p1:
        raise DomainError(f"need p0 < p1, got {p0}, {p1}")
    pet0, pet1 = _pet(d, p0), _pet(d, p1)
    n2 = d.nf - d.n1
    return SimonProperties(
        attained_alpha=_reject_prob(d, p0),
        attained_power=_reject_prob(d, p1),
        pet0=pet0,
        en0=d.n1 + (1.0 - pet0) * n2,
        pet1=pet1,
        en1=d.n1 + (1.0 - pet1) * n2,
    )


class _Tables:
    """Binomial mass and upper-tail tables for every n up to ``n_max``."""

    def __init__(self, p: float, n_max: int):
        self.pmf = [binomial_pmf_table(n, p) for n in range(n_max + 1)]
        # sf[n][j] = P(X >= j) for j = 0..n+1
        self.sf = []
        for pm in self.pmf:
            tail = np.cumsum(pm[::-1])[::-1]
            self.sf.append(np.minimum(np.concatenate([tail, [0.0]]), 1.0))


def _reject_matrix(tab: _Tables, n1: int, n2: int) -> np.ndarray:
    """``R[r1, rf]`` rejection probability for all cutoffs at fixed sizes."""
    nf = n1 + n2
    x = np.arange(n1 + 1)[:, None]
    rf = np.arange(nf + 1)[None, :]
    j = np.clip(rf - x + 1, 0, n2 + 1)  # P(X2 > rf - x) = P(X2 >= rf - x + 1)
    a = tab.pmf[n1][:, None] * tab.sf[n2][j]
    # R[r1] = sum_{x > r1} A[x]; row n1 is empty
    rev = np.cumsum(a[::-1], axis=0)[::-1]
    return np.vstack([rev[1:], np.zeros((1, nf + 1))])


def _scan_nf(nf, t0, t1, alpha, beta):
    """Best (optimal, minimax) candidates for one maximal size ``nf``."""
    best = None
    for n1 in range(1, nf):
        n2 = nf - n1
        r0 = _reject_matrix(t0, n1, n2)
        r1m = _reject_matrix(t1, n1, n2)
        ok = (r0 <= alpha) & (r1m >= 1.0 - beta)
        ok &= np.arange(nf + 1)[None, :] >= np.arange(n1 + 1)[:, None]
        rows = np.nonzero(ok.any(axis=1))[0]
        if rows.size == 0:
            continue
        # en0 decreases in r1, so the largest feasible r1 is best for this (nf, n1)
        r1 = int(rows[-1])
        rf = int(np.nonzero(ok[r1])[0][0])
        pet0 = min(1.0, float(np.sum(t0.pmf[n1][: r1 + 1])))
        en0 = n1 + (1.0 - pet0) * n2
        key = (round(en0, 10), nf, n1, r1)
        if best is None or key < best[0]:
            best = (key, SimonDesign(n1, r1, nf, rf))
    return best


def search_optimal(
    p0: float,
    p1: float,
    alpha: float,
    beta: float,
    n_max: int = 200,
    n_min: int = 2,
    workers: int = 1,
) -> SearchResult:
    """Exhaustive search for the optimal and minimax Simon designs.

    Optimal minimises ``en0``; minimax minimises ``nf`` then ``en0``. Ties are
    broken by smaller ``nf``, then ``n1``, then ``r1``. Among final cutoffs the
    smallest feasible ``rf`` (highest power) is kept.

    Args:
        p0: Unacceptable response rate.
        p1: Target response rate.
        alpha: Maximum type-I error.
        beta: Maximum type-II error.
        n_max: Largest total sample size searched.
        n_min: Smallest total sample size searched.
        workers: Threads used to partition the ``nf`` range. The result does
            not depend on this value.

    Raises:
        InfeasibleDesignError: If no feasible design has ``nf <= n_max``.
    """
    p0 = check_probability(p0, "p0", open_interval=True)
    p1 = check_probability(p1, "p1", open_interval=True)
    alpha = check_probability(alpha, "alpha", open_interval=True)
    beta = check_probability(beta, "beta", open_interval=True)
    if not p0 < p1:
        raise DomainError(f"need p0 < p1, got {p0}, {p1}")
    t0, t1 = _Tables(p0, n_max), _Tables(p1, n_max)
    nfs = range(max(n_min, 2), n_max + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            found = list(ex.map(lambda nf: _scan_nf(nf, t0, t1, alpha, beta), nfs))
    else:
        found = [_scan_nf(nf, t0, t1, alpha, beta) for nf in nfs]
    found = [f for f in found if f is not None]
    if not found:
        hint = _single_stage_min_n(p0, p1, alpha, beta, 4 * n_max)
        raise InfeasibleDesignError(
            f"no two-stage design with nf <= {n_max}"
            + (f"; a single-stage design first becomes feasible at n={hint}" if hint else ""),
            details={"n_max": n_max, "relaxed_min_n": hint},
        )
    opt = min(found, key=lambda f: f[0])[1]
    mm = min(found, key=lambda f: (f[0][1], f[0][0], f[0][2], f[0][3]))[1]
    return SearchResult(
        optimal=SimonResult(opt, evaluate_design(opt, p0, p1)),
        minimax=SimonResult(mm, evaluate_design(mm, p0, p1)),
    )


def _single_stage_min_n(p0, p1, alpha, beta, n_cap):
    for n in range(1, n_cap + 1):
        t0 = np.cumsum(binomial_pmf_table(n, p0)[::-1])[::-1]
        k = int(np.argmax(t0 <= alpha)) if np.any(t0 <= alpha) else None
        if k is not None and binomial_sf(k, n, p1) >= 1.0 - beta:
            return n
    return None


def simon_bacs(
    props: SimonProperties,
    prior: DesignPrior,
    mode: str = "nominal",
    alpha: float | None = None,
    beta: float | None = None,
) -> BacsResult:
    """BACs of a Simon design.

    Args:
        props: Exact properties of the design.
        prior: Pre-study odds.
        mode: ``"nominal"`` uses ``(1 - alpha, 1 - beta)``; ``"attained"`` uses
            the exact attained error rates.
        alpha: Nominal type-I error (nominal mode).
        beta: Nominal type-II error (nominal mode).
    """
    if mode == "nominal":
        if alpha is None or beta is None:
            raise DomainError("nominal mode requires alpha and beta")
        oc = OperatingCharacteristics(1.0 - alpha, 1.0 - beta)
    elif mode == "attained":
        oc = OperatingCharacteristics(1.0 - props.attained_alpha, props.attained_power)
    else:
        raise DomainError(f"unknown mode {mode!r}")
    return post_study_odds(prior, oc)
