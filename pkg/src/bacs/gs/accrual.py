"""Expected enrollment and event accrual for exponential time-to-event trials.

Enrollment intensity rises linearly over the ramp-up period and is constant
until enrollment closes. Event times are exponential in each arm; an optional
exponential dropout hazard competes with the event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

from ..errors import DomainError, InfeasibleDesignError
from ..numerics import find_root, normal_quantile

__all__ = [
    "SurvivalScenario",
    "SubjectCount",
    "subjects_for_events",
    "lachin_foulkes_events",
]


@dataclass(frozen=True)
class SurvivalScenario:
    """Accrual and event-time assumptions under 1:1 randomisation.

    Attributes:
        median_control: Median event time in the control arm (months).
        hr_alt: Hazard ratio treatment/control under H1.
        enroll_duration: Months from first to last enrollment.
        ramp_duration: Months of linear ramp-up to the steady enrollment rate.
        min_followup: Months from last enrollment to final analysis.
        dropout_rate: Exponential dropout hazard per month (0 for none).
    """

    median_control: float = 10.0
    hr_alt: float = 0.67
    enroll_duration: float = 24.0
    ramp_duration: float = 6.0
    min_followup: float = 12.0
    dropout_rate: float = 0.0

    def __post_init__(self):
        for name in ("median_control", "enroll_duration", "min_followup"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if not (self.hr_alt > 0 and self.hr_alt != 1):
            raise DomainError(f"hr_alt={self.hr_alt} must be positive and differ from 1")
        if not 0 <= self.ramp_duration <= self.enroll_duration:
            raise DomainError("ramp_duration must lie in [0, enroll_duration]")
        if self.dropout_rate < 0:
            raise DomainError("dropout_rate must be nonnegative")

    @property
    def hazard_control(self) -> float:
        return math.log(2.0) / self.median_control

    @property
    def hazard_treat(self) -> float:
        return self.hazard_control * self.hr_alt

    @property
    def final_time(self) -> float:
        return self.enroll_duration + self.min_followup

    def _height(self) -> float:
        return 1.0 / (self.enroll_duration - self.ramp_duration / 2.0)

    def accrual_density(self, u: float) -> float:
        """Fraction of the total sample enrolling per month at time ``u``."""
        if u < 0 or u > self.enroll_duration:
            return 0.0
        h = self._height()
        if self.ramp_duration > 0 and u < self.ramp_duration:
            return h * u / self.ramp_duration
        return h

    def accrual_cdf(self, t: float) -> float:
        """Fraction of the total sample enrolled by calendar time ``t``."""
        if t <= 0:
            return 0.0
        h, r = self._height(), self.ramp_duration
        t = min(t, self.enroll_duration)
        if r > 0 and t <= r:
            return h * t * t / (2.0 * r)
        return min(1.0, h * (r / 2.0 + (t - r)))

    def event_probability(self, hazard: float, t: float) -> float:
        """Probability that a random enrollee has an observed event by time ``t``."""
        if t <= 0:
            return 0.0
        eta = self.dropout_rate
        lam = hazard + eta
        up = min(t, self.enroll_duration)

        def integrand(u):
            return self.accrual_density(u) * (hazard / lam) * -math.expm1(-lam * (t - u))

        pts = [self.ramp_duration] if 0 < self.ramp_duration < up else None
        val, _ = integrate.quad(integrand, 0.0, up, points=pts, epsabs=1e-13, epsrel=1e-12, limit=200)
        return val

    def mean_event_probability(self, t: float, hr: float | None = None) -> float:
        """Event probability by ``t`` averaged over the two arms."""
        hr = self.hr_alt if hr is None else hr
        lc = self.hazard_control
        return 0.5 * (self.event_probability(lc, t) + self.event_probability(lc * hr, t))

    def expected_events(self, n: float, t: float, hr: float | None = None) -> float:
        return n * self.mean_event_probability(t, hr)


@dataclass(frozen=True)
class SubjectCount:
    """Subjects required (or enrolled) and the calendar time of the analysis.

    Attributes:
        n_subjects: Rounded-up subject count.
        n_exact: Unrounded value.
        analysis_time: Expected calendar time (months) of the analysis.
    """

    n_subjects: int
    n_exact: float
    analysis_time: float


def subjects_for_events(
    sc: SurvivalScenario,
    events_required: float,
    analysis_time: float | None = None,
    n_total: float | None = None,
) -> SubjectCount:
    """Subjects needed to expect ``events_required`` events, or enrolled at an interim.

    Final mode (``n_total`` is None): ``N`` solves
    ``E(N, T) = events_required`` at ``T = analysis_time`` (default
    ``enroll_duration + min_followup``).

    Interim mode (``n_total`` given): finds the calendar time at which a trial
    of ``n_total`` subjects expects ``events_required`` events, and returns
    the expected number enrolled by then.

    Raises:
        InfeasibleDesignError: If the event target cannot be reached.
    """
    if events_required <= 0:
        raise DomainError("events_required must be positive")
    if n_total is None:
        t = sc.final_time if analysis_time is None else float(analysis_time)
        p = sc.mean_event_probability(t)
        if p <= 0:
            raise InfeasibleDesignError(f"no events expected by t={t}")
        n = events_required / p
        return SubjectCount(int(math.ceil(n - 1e-9)), n, t)
    horizon = sc.final_time if analysis_time is None else float(analysis_time)
    if sc.expected_events(n_total, horizon) < events_required:
        raise InfeasibleDesignError(
            f"{n_total} subjects expect fewer than {events_required} events by t={horizon}"
        )
    t = find_root(lambda s: sc.expected_events(n_total, s) - events_required, (1e-9, horizon), tol=1e-10)
    enrolled = n_total * sc.accrual_cdf(t)
    return SubjectCount(int(math.ceil(enrolled - 1e-9)), enrolled, t)


def lachin_foulkes_events(sc: SurvivalScenario, alpha_two_sided: float, power: float) -> float:
    """Unrounded events of the fixed design from the log-hazard-ratio sample size.

    Uses the null variance at the pooled hazard and the alternative variance at
    the arm-specific hazards, each scaled by the event probability by the final
    analysis. Returns ``N * mean event probability``, the expected event count.
    """
    za = normal_quantile(1.0 - alpha_two_sided / 2.0)
    zb = normal_quantile(power)
    t = sc.final_time
    lc, le = sc.hazard_control, sc.hazard_treat
    pc, pe = sc.event_probability(lc, t), sc.event_probability(le, t)
    p_pool = sc.event_probability(0.5 * (lc + le), t)
    n = (za * math.sqrt(4.0 / p_pool) + zb * math.sqrt(2.0 / pc + 2.0 / pe)) ** 2 / math.log(sc.hr_alt) ** 2
    return n * 0.5 * (pc + pe)
