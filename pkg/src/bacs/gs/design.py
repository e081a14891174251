"""Group-sequential design: boundaries, drift, event counts and stage BACs.

Efficacy boundaries come from two-sided symmetric alpha spending. An optional
futility boundary is set by beta spending under the alternative with the same
spending family; it does not consume alpha (upper boundaries are solved
without it) but is counted as binding when computing power, so the drift
needed for the target power grows slightly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core import DesignPrior, OperatingCharacteristics, post_study_odds
from ..errors import ConvergenceError, DomainError, NoSignChangeError
from ..numerics import check_probability, find_root, normal_cdf, normal_quantile
from .accrual import SurvivalScenario, lachin_foulkes_events, subjects_for_events
from .recursion import DEFAULT_NODES, Propagator, check_fractions, crossing_probabilities
from .spending import SpendingFunction, lan_demets

__all__ = [
    "GSDesign",
    "GSPower",
    "StageReport",
    "FutilityResult",
    "schoenfeld_events",
    "schoenfeld_events_continuous",
    "solve_boundaries",
    "gs_power",
    "solve_drift",
    "beta_spending_futility",
    "design_gs",
    "required_max_events",
    "z_to_hr",
    "hr_to_z",
    "futility_analysis",
    "stage_bacs",
    "fixed_design_report",
]

_Z_SHIFT_TOL = 1e-5


def schoenfeld_events_continuous(hr_alt: float, alpha_two_sided: float, power: float) -> float:
    """``4 (z_{1-a/2} + z_power)^2 / ln(hr)^2`` without rounding."""
    if not hr_alt > 0 or hr_alt == 1.0:
        raise DomainError(f"hr_alt={hr_alt} must be positive and differ from 1")
    za = normal_quantile(1.0 - check_probability(alpha_two_sided, "alpha", True) / 2.0)
    zb = normal_quantile(check_probability(power, "power", True))
    return 4.0 * (za + zb) ** 2 / math.log(hr_alt) ** 2


def schoenfeld_events(hr_alt: float, alpha_two_sided: float, power: float) -> int:
    """Events for a fixed log-rank design under 1:1 allocation, rounded up."""
    return int(math.ceil(schoenfeld_events_continuous(hr_alt, alpha_two_sided, power) - 1e-9))


def z_to_hr(z: float, events: float) -> float:
    """Hazard ratio at which the log-rank z equals ``z`` with ``events`` events."""
    if events <= 0:
        raise DomainError("events must be positive")
    return math.exp(-2.0 * z / math.sqrt(events))


def hr_to_z(hr: float, events: float) -> float:
    """Inverse of ``z_to_hr``."""
    if events <= 0 or hr <= 0:
        raise DomainError("events and hr must be positive")
    return -math.log(hr) * math.sqrt(events) / 2.0


def _solve_symmetric(sf: SpendingFunction, t: np.ndarray, n_nodes: int) -> np.ndarray:
    prop = Propagator(t, 0.0, n_nodes)
    z = []
    spent = 0.0
    for k in range(t.size):
        target = sf(t[k]) - spent
        spent = sf(t[k])

        def resid(c):
            up, lo = prop.exit_probs(c, -c)
            return up + lo - target

        c = find_root(resid, (0.0, 40.0), tol=1e-12)
        z.append(c)
        prop.advance(c, -c)
    return np.array(z)


def solve_boundaries(
    sf: SpendingFunction,
    info_fractions: Sequence[float],
    n_nodes: int = DEFAULT_NODES,
    refine: bool = True,
    max_nodes: int = 4 * DEFAULT_NODES,
) -> np.ndarray:
    """Symmetric two-sided efficacy boundaries matching the spending function.

    Stage ``k``'s boundary makes the H0 probability of first crossing
    ``|Z_k| >= z_k`` at stage ``k`` equal to the spending increment. With
    ``refine`` the grid is doubled until boundaries move less than 1e-5.

    Raises:
        ConvergenceError: If refinement does not settle within ``max_nodes``.
    """
    t = check_fractions(info_fractions)
    z = _solve_symmetric(sf, t, n_nodes)
    if not refine or t.size == 1:
        return z
    nodes = n_nodes
    while True:
        nodes = 2 * nodes - 1
        z2 = _solve_symmetric(sf, t, nodes)
        shift = float(np.max(np.abs(z2 - z)))
        z = z2
        if shift < _Z_SHIFT_TOL:
            return z
        if nodes > max_nodes:
            raise ConvergenceError(f"boundary shift {shift:.2e} after refining to {nodes} nodes", residual=shift)


@dataclass(frozen=True)
class GSPower:
    """Crossing probabilities under a given drift.

    Attributes:
        per_stage: Upper (efficacy) crossing probability at each stage.
        cumulative: Running sum of ``per_stage``.
        lower_per_stage: Lower crossing probability at each stage.
        lower_cumulative: Running sum of ``lower_per_stage``.
    """

    per_stage: np.ndarray
    cumulative: np.ndarray
    lower_per_stage: np.ndarray
    lower_cumulative: np.ndarray


def gs_power(
    z_bounds: Sequence[float],
    info_fractions: Sequence[float],
    drift: float,
    futility_bounds: Sequence[float] | None = None,
    n_nodes: int = DEFAULT_NODES,
) -> GSPower:
    """Upper crossing probabilities with mean ``drift * sqrt(t_k)`` at stage ``k``.

    Without ``futility_bounds`` there is no lower boundary, so at zero drift the
    cumulative values equal the one-sided spending, half the two-sided spend.
    """
    up, lo = crossing_probabilities(z_bounds, info_fractions, drift, futility_bounds, n_nodes)
    return GSPower(up, np.cumsum(up), lo, np.cumsum(lo))


def solve_drift(
    z_bounds: Sequence[float],
    info_fractions: Sequence[float],
    power: float,
    futility_bounds: Sequence[float] | None = None,
    n_nodes: int = DEFAULT_NODES,
) -> float:
    """Drift at which the total upper crossing probability equals ``power``."""
    power = check_probability(power, "power", open_interval=True)

    def resid(th):
        return gs_power(z_bounds, info_fractions, th, futility_bounds, n_nodes).cumulative[-1] - power

    hi = max(z_bounds) + normal_quantile(power) + 1.0
    while resid(hi) < 0:
        hi *= 1.5
    return find_root(resid, (0.0, hi), tol=1e-11)


def beta_spending_futility(
    z_bounds: Sequence[float],
    info_fractions: Sequence[float],
    drift: float,
    family: str,
    beta: float,
    n_nodes: int = DEFAULT_NODES,
) -> np.ndarray:
    """Lower boundaries spending ``beta`` under the alternative drift.

    Stage ``k``'s lower boundary makes the probability of first falling below
    it equal to the beta-spending increment. When the target cannot be met
    below the efficacy boundary the two boundaries meet. The final lower
    boundary equals the final efficacy boundary.
    """
    t = check_fractions(info_fractions)
    z_bounds = list(z_bounds)
    prop = Propagator(t, drift, n_nodes)
    b = []
    spent = 0.0
    for k in range(t.size - 1):
        cum = lan_demets(family, t[k], beta)
        target = cum - spent
        spent = cum
        a_k = z_bounds[k]

        def resid(c):
            return prop.exit_probs(a_k, c)[1] - target

        if resid(a_k) <= 0:
            c = a_k
        else:
            c = find_root(resid, (-40.0, a_k), tol=1e-12)
        b.append(c)
        prop.advance(a_k, c)
    b.append(z_bounds[-1])
    return np.array(b)


@dataclass(frozen=True)
class GSDesign:
    """A solved group-sequential time-to-event design.

    Attributes:
        spending: Alpha spending function (two-sided total).
        info_fractions: Planned information fractions.
        z_bounds: Efficacy z boundaries.
        futility_bounds: Lower z boundaries, or None without futility.
        drift: Design drift, the mean of ``Z`` at full information for which
            the target power is reached exactly.
        max_events: Events at the final analysis.
        events: Events at each analysis.
        hr_alt: Alternative hazard ratio.
        power: Target power.
        fixed_events: Unrounded events of the matching fixed design.
        beta_family: Spending family of the futility boundary, if any.
    """

    spending: SpendingFunction
    info_fractions: tuple
    z_bounds: tuple
    futility_bounds: tuple | None
    drift: float
    max_events: int
    events: tuple
    hr_alt: float
    power: float
    fixed_events: float
    beta_family: str | None = None

    @property
    def k(self) -> int:
        return len(self.info_fractions)

    @property
    def hr_bounds(self) -> tuple:
        return tuple(z_to_hr(z, e) for z, e in zip(self.z_bounds, self.events))

    @property
    def futility_hr(self) -> tuple | None:
        if self.futility_bounds is None:
            return None
        return tuple(z_to_hr(z, e) for z, e in zip(self.futility_bounds, self.events))

    @property
    def inflation(self) -> float:
        """Ratio of group-sequential to fixed-design information."""
        za = normal_quantile(1.0 - self.spending.alpha_one_sided)
        return (self.drift / (za + normal_quantile(self.power))) ** 2


def _solve_drift_with_futility(z, t, power, family, n_nodes):
    beta = 1.0 - power
    th0 = solve_drift(z, t, power, None, n_nodes)

    def resid(th):
        b = beta_spending_futility(z, t, th, family, beta, n_nodes)
        return gs_power(z, t, th, b, n_nodes).cumulative[-1] - power

    hi = 1.5 * th0
    while resid(hi) < 0:
        hi *= 1.5
    try:
        th = find_root(resid, (th0, hi), tol=1e-10)
    except NoSignChangeError:
        th = th0
    return th, beta_spending_futility(z, t, th, family, beta, n_nodes)


def design_gs(
    sf: SpendingFunction,
    info_fractions: Sequence[float],
    hr_alt: float,
    power: float,
    futility: str | None = "beta_spending",
    scenario: SurvivalScenario | None = None,
    n_nodes: int = DEFAULT_NODES,
) -> GSDesign:
    """Solve boundaries, drift and event counts of a group-sequential design.

    Args:
        sf: Alpha spending function.
        info_fractions: Analysis times as fractions of the final information.
        hr_alt: Alternative hazard ratio.
        power: Target power.
        futility: ``"beta_spending"`` adds a futility boundary spending
            ``1 - power`` with the same family; None gives efficacy only.
        scenario: When given, the fixed-design event count comes from the
            accrual-aware log-hazard-ratio formula instead of Schoenfeld's.
        n_nodes: Grid nodes per stage.

    Returns:
        The solved design. Maximum events are the fixed-design events times
        the information inflation factor, rounded up; interim events are
        ``ceil(max_events * t_k)``.
    """
    t = check_fractions(info_fractions)
    power = check_probability(power, "power", open_interval=True)
    z = solve_boundaries(sf, t, n_nodes)
    if futility is None:
        th = solve_drift(z, t, power, None, n_nodes)
        b = None
    elif futility == "beta_spending":
        th, b = _solve_drift_with_futility(z, t, power, sf.family, n_nodes)
        b = tuple(float(x) for x in b)
    else:
        raise DomainError(f"unknown futility option {futility!r}")
    if scenario is not None:
        fixed = lachin_foulkes_events(scenario, sf.total_alpha, power)
    else:
        fixed = schoenfeld_events_continuous(hr_alt, sf.total_alpha, power)
    za = normal_quantile(1.0 - sf.alpha_one_sided)
    inflation = (th / (za + normal_quantile(power))) ** 2
    d_max = int(math.ceil(fixed * inflation - 1e-9))
    events = tuple(int(math.ceil(d_max * tk - 1e-9)) for tk in t)
    return GSDesign(
        spending=sf,
        info_fractions=tuple(float(x) for x in t),
        z_bounds=tuple(float(x) for x in z),
        futility_bounds=b,
        drift=float(th),
        max_events=d_max,
        events=events,
        hr_alt=float(hr_alt),
        power=power,
        fixed_events=float(fixed),
        beta_family=sf.family if b is not None else None,
    )


def required_max_events(
    sf: SpendingFunction,
    info_fractions: Sequence[float],
    hr_alt: float,
    power: float,
    futility: str | None = None,
    scenario: SurvivalScenario | None = None,
) -> int:
    """Smallest maximum event count reaching ``power``.

    Without a scenario this is the smallest ``d`` with
    ``|ln hr_alt| sqrt(d / 4)`` at least the drift solved for ``power``.
    """
    return design_gs(sf, info_fractions, hr_alt, power, futility, scenario).max_events


@dataclass(frozen=True)
class FutilityResult:
    z_futility: float
    p_cross_h0: float
    p_cross_h1: float
    likelihood_ratio: float
    updated_neg_odds: float


_P_FLOOR = 1e-300


def futility_analysis(
    hr_futility: float,
    events_at_stage: float,
    drift: float,
    info_fraction: float,
    prior: DesignPrior,
) -> FutilityResult:
    """Evidence carried by crossing an interim futility boundary.

    The interim z falls on the futility side when ``Z <= z_f`` with
    ``z_f = -ln(hr_futility) sqrt(events) / 2``. Under H0 ``Z ~ N(0, 1)``;
    under H1 ``Z ~ N(drift sqrt(info_fraction), 1)``.

    Raises:
        DomainError: If the H1 probability underflows.
    """
    if not 0 < hr_futility < 1.5:
        raise DomainError(f"hr_futility={hr_futility} must lie in (0, 1.5)")
    if events_at_stage <= 0:
        raise DomainError("events_at_stage must be positive")
    t = float(info_fraction)
    if not 0 < t <= 1:
        raise DomainError("info_fraction must lie in (0, 1]")
    zf = hr_to_z(hr_futility, events_at_stage)
    p0 = normal_cdf(zf)
    p1 = normal_cdf(zf - drift * math.sqrt(t))
    if p1 <= _P_FLOOR:
        raise DomainError(f"futility probability under H1 underflows (< {_P_FLOOR:g})")
    lr = p0 / p1
    return FutilityResult(zf, p0, p1, lr, prior.r01 * lr)


@dataclass(frozen=True)
class StageReport:
    stage: int
    label: str
    events: int
    subjects_enrolled: int | None
    cum_specificity: float
    cum_sensitivity: float
    hr_boundary: float
    neg_odds: float
    pos_odds: float
    z_bound: float
    subjects_exact: float | None = None
    analysis_time: float | None = None


def _subjects(design_events, scenario):
    """Final subjects and interim enrolled counts for the event schedule."""
    final = subjects_for_events(scenario, design_events[-1])
    out = []
    for e in design_events[:-1]:
        out.append(subjects_for_events(scenario, e, n_total=final.n_subjects))
    out.append(final)
    return out


def stage_bacs(
    design: GSDesign,
    prior: DesignPrior,
    scenario: SurvivalScenario | None = None,
    prob_decimals: int | None = None,
    n_nodes: int = DEFAULT_NODES,
) -> list[StageReport]:
    """Per-stage cumulative operating characteristics and BACs.

    Specificity at stage ``k`` is one minus twice the H0 probability of having
    crossed the upper boundary by stage ``k`` (symmetric two-sided
    convention); sensitivity is the cumulative upper crossing probability at
    the design drift. A futility boundary, if present, is applied to both.

    Args:
        design: Solved design.
        prior: Pre-study odds.
        scenario: Adds subject counts when given.
        prob_decimals: Round the one-sided crossing probabilities to this many
            decimals before forming odds (reporting precision).
        n_nodes: Grid nodes per stage.
    """
    h0 = gs_power(design.z_bounds, design.info_fractions, 0.0, design.futility_bounds, n_nodes)
    h1 = gs_power(design.z_bounds, design.info_fractions, design.drift, design.futility_bounds, n_nodes)
    subj = _subjects(design.events, scenario) if scenario is not None else [None] * design.k
    reports = []
    for k in range(design.k):
        a0, p1 = float(h0.cumulative[k]), float(h1.cumulative[k])
        if prob_decimals is not None:
            a0, p1 = round(a0, prob_decimals), round(p1, prob_decimals)
        spec = 1.0 - 2.0 * a0
        res = post_study_odds(prior, OperatingCharacteristics(spec, p1))
        s = subj[k]
        label = "FA" if k == design.k - 1 else ("IA" if design.k == 2 else f"IA{k + 1}")
        reports.append(StageReport(
            stage=k + 1,
            label=label,
            events=design.events[k],
            subjects_enrolled=None if s is None else s.n_subjects,
            cum_specificity=spec,
            cum_sensitivity=p1,
            hr_boundary=z_to_hr(design.z_bounds[k], design.events[k]),
            neg_odds=res.neg_odds,
            pos_odds=res.pos_odds,
            z_bound=design.z_bounds[k],
            subjects_exact=None if s is None else s.n_exact,
            analysis_time=None if s is None else s.analysis_time,
        ))
    return reports


def fixed_design_report(
    hr_alt: float,
    alpha_two_sided: float,
    power: float,
    prior: DesignPrior,
    scenario: SurvivalScenario | None = None,
) -> StageReport:
    """Single-analysis comparator with nominal specificity and power."""
    if scenario is not None:
        events = int(math.ceil(lachin_foulkes_events(scenario, alpha_two_sided, power) - 1e-9))
    else:
        events = schoenfeld_events(hr_alt, alpha_two_sided, power)
    z = normal_quantile(1.0 - alpha_two_sided / 2.0)
    spec = 1.0 - alpha_two_sided
    res = post_study_odds(prior, OperatingCharacteristics(spec, power))
    s = subjects_for_events(scenario, events) if scenario is not None else None
    return StageReport(
        stage=1, label="fixed", events=events,
        subjects_enrolled=None if s is None else s.n_subjects,
        cum_specificity=spec, cum_sensitivity=power,
        hr_boundary=z_to_hr(z, events), neg_odds=res.neg_odds, pos_odds=res.pos_odds,
        z_bound=z,
        subjects_exact=None if s is None else s.n_exact,
        analysis_time=None if s is None else s.analysis_time,
    )
