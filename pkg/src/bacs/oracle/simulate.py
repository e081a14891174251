"""Seeded Monte Carlo simulation of every design type.

Replicates are split into fixed-size blocks. Block ``i`` draws from its own
stream ``SeedSequence(seed, spawn_key=(i,))``, and blocks return integer
counts that are summed, so results are identical for any worker count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable

import numpy as np

from ..errors import ConfigError
from ..gs.accrual import SurvivalScenario, subjects_for_events
from ..gs.design import GSDesign
from ..numerics import normal_quantile
from ..simon import SimonDesign
from ..single_arm import SingleArmDesign
from ..two_arm import TwoArmScenario

__all__ = [
    "TwoArmDesign",
    "SimConfig",
    "SimResult",
    "block_rng",
    "run_blocks",
    "simulate",
    "simulate_simon",
    "simulate_single_arm",
    "simulate_two_arm",
    "simulate_gs_gaussian",
    "simulate_gs_survival",
]

DEFAULT_BLOCK = 100_000
SURVIVAL_BLOCK = 4_000


def block_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for block ``index`` of master ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def run_blocks(
    kernel: Callable[..., np.ndarray],
    reps: int,
    seed: int,
    block_size: int = DEFAULT_BLOCK,
    workers: int = 1,
    **params,
) -> np.ndarray:
    """Run ``kernel(rng, n, **params)`` over blocks and sum the count vectors."""
    if reps < 1:
        raise ConfigError("replicates must be at least 1")
    if block_size < 1:
        raise ConfigError("block_size must be at least 1")
    sizes = [min(block_size, reps - i) for i in range(0, reps, block_size)]

    def one(i):
        return np.asarray(kernel(block_rng(seed, i), sizes[i], **params), dtype=np.int64)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(one, range(len(sizes))))
    else:
        parts = [one(i) for i in range(len(sizes))]
    return np.sum(parts, axis=0)


@dataclass(frozen=True)
class TwoArmDesign:
    scenario: TwoArmScenario
    n_total: int
    yates: bool = False


@dataclass(frozen=True)
class SimConfig:
    """A simulation request.

    Attributes:
        seed: Master seed.
        replicates: Number of simulated trials.
        design: ``SimonDesign``, ``SingleArmDesign``, ``TwoArmDesign`` or
            ``GSDesign``.
        truth: ``"H0"``, ``"H1"`` or an explicit parameter: a response rate
            for single-arm designs, ``(p_control, p_treat)`` for two-arm
            designs, a hazard ratio for GS designs.
        p0: Null response rate (Simon and single-arm designs).
        p1: Alternative response rate (Simon and single-arm designs).
        scenario: Accrual scenario; GS designs are simulated per subject with
            the log-rank test when given, otherwise by Gaussian increments.
        block_size: Replicates per block (the chunk policy).
        workers: Threads; does not affect results.
    """

    seed: int
    replicates: int
    design: Any
    truth: Any = "H1"
    p0: float | None = None
    p1: float | None = None
    scenario: SurvivalScenario | None = None
    block_size: int | None = None
    workers: int = 1


@dataclass(frozen=True)
class SimResult:
    """Empirical operating characteristics with binomial standard errors.

    ``se`` is floored at ``1 / replicates`` so that a zero count still carries
    a positive error.
    """

    replicates: int
    positive_rate: float
    se: float
    early_stop_rate: float | None = None
    early_stop_se: float | None = None
    mean_sample_size: float | None = None
    mean_sample_size_se: float | None = None
    cumulative_rates: list | None = None
    cumulative_se: list | None = None
    lower_cumulative_rates: list | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _rate(count, n):
    p = count / n
    return float(p), float(max(math.sqrt(p * (1.0 - p) / n), 1.0 / n))


# -- Simon -------------------------------------------------------------------


def _simon_kernel(rng, n, n1, r1, nf, rf, p):
    x1 = rng.binomial(n1, p, n)
    x2 = rng.binomial(nf - n1, p, n)
    go = x1 > r1
    reject = go & (x1 + x2 > rf)
    size = np.where(go, nf, n1)
    return [reject.sum(), (~go).sum(), size.sum(), (size.astype(np.int64) ** 2).sum()]


def simulate_simon(d: SimonDesign, p: float, seed: int, reps: int, block_size=DEFAULT_BLOCK, workers=1) -> SimResult:
    c = run_blocks(_simon_kernel, reps, seed, block_size, workers, n1=d.n1, r1=d.r1, nf=d.nf, rf=d.rf, p=p)
    rate, se = _rate(c[0], reps)
    pet, pet_se = _rate(c[1], reps)
    mean = c[2] / reps
    var = max(c[3] / reps - mean * mean, 0.0)
    return SimResult(reps, rate, se, pet, pet_se, float(mean), float(max(math.sqrt(var / reps), 1.0 / reps)))


# -- single arm --------------------------------------------------------------


def _single_arm_kernel(rng, n, size, k, p, rule, p0, z):
    x = rng.binomial(size, p, n)
    if rule == "exact":
        reject = x >= k
    else:
        stat = 2.0 * math.sqrt(size) * (np.arcsin(np.sqrt(x / size)) - math.asin(math.sqrt(p0)))
        reject = np.abs(stat) > z
    return [reject.sum()]


def simulate_single_arm(
    d: SingleArmDesign, p: float, seed: int, reps: int, p0: float | None = None,
    block_size=DEFAULT_BLOCK, workers=1,
) -> SimResult:
    """Rejection rate of a single-arm design at response rate ``p``.

    Exact designs reject when responses reach ``critical_k``. Arcsine designs
    run the two-sided arcsine z test, which needs ``p0``.
    """
    if d.method == "arcsine" and p0 is None:
        raise ConfigError("arcsine designs need p0 to simulate the test")
    z = normal_quantile(1.0 - d.alpha / 2.0)
    c = run_blocks(_single_arm_kernel, reps, seed, block_size, workers,
                   size=d.n, k=d.critical_k, p=p, rule=d.method, p0=p0 or 0.0, z=z)
    rate, se = _rate(c[0], reps)
    return SimResult(reps, rate, se)


# -- two arm -----------------------------------------------------------------


def _two_arm_kernel(rng, n, m, pc, pt, crit, yates):
    x0 = rng.binomial(m, pc, n).astype(float)
    x1 = rng.binomial(m, pt, n).astype(float)
    tot = x0 + x1
    big_n = 2.0 * m
    diff = np.abs(x1 * (m - x0) - x0 * (m - x1))
    if yates:
        diff = np.maximum(diff - big_n / 2.0, 0.0)
    denom = m * m * tot * (big_n - tot)
    with np.errstate(divide="ignore", invalid="ignore"):
        chi2 = np.where(denom > 0, big_n * diff * diff / denom, 0.0)
    reject = chi2 > crit
    return [reject.sum(), (reject & (x1 > x0)).sum()]


def simulate_two_arm(
    s: TwoArmScenario, n_total: int, seed: int, reps: int, yates: bool = False,
    p_control: float | None = None, p_treat: float | None = None,
    block_size=DEFAULT_BLOCK, workers=1,
) -> SimResult:
    """Rejection rate of the two-sided chi-square test.

    ``extra["directional_rate"]`` counts only rejections favouring treatment.
    """
    pc = s.p_control if p_control is None else p_control
    pt = s.p_treat if p_treat is None else p_treat
    crit = normal_quantile(1.0 - s.alpha_two_sided / 2.0) ** 2
    c = run_blocks(_two_arm_kernel, reps, seed, block_size, workers,
                   m=n_total // 2, pc=pc, pt=pt, crit=crit, yates=yates)
    rate, se = _rate(c[0], reps)
    drate, dse = _rate(c[1], reps)
    return SimResult(reps, rate, se, extra={"directional_rate": drate, "directional_se": dse})


# -- group sequential ----------------------------------------------------------


def _crossings(z, upper, lower):
    """First-crossing stage counts for an (n, K) array of z statistics."""
    n, k = z.shape
    alive = np.ones(n, dtype=bool)
    up = []
    lo = []
    for j in range(k):
        u = alive & (z[:, j] >= upper[j])
        l = alive & ~u & (z[:, j] <= lower[j]) if j < k - 1 else np.zeros(n, dtype=bool)
        up.append(u.sum())
        lo.append(l.sum())
        alive &= ~(u | l)
    return up + lo


def _gauss_kernel(rng, n, t, drift, upper, lower):
    dt = np.diff(np.concatenate([[0.0], t]))
    inc = rng.standard_normal((n, t.size)) * np.sqrt(dt) + drift * dt
    z = np.cumsum(inc, axis=1) / np.sqrt(t)
    return _crossings(z, upper, lower)


def _gs_result(c, k, reps):
    up = np.cumsum(c[:k])
    lo = np.cumsum(c[k:])
    rates = [_rate(x, reps) for x in up]
    return SimResult(
        reps, rates[-1][0], rates[-1][1],
        cumulative_rates=[r for r, _ in rates],
        cumulative_se=[s for _, s in rates],
        lower_cumulative_rates=[float(x / reps) for x in lo],
    )


def _bounds(design: GSDesign):
    lower = design.futility_bounds if design.futility_bounds is not None else [-np.inf] * design.k
    return np.asarray(design.z_bounds, float), np.asarray(lower, float)


def simulate_gs_gaussian(design: GSDesign, drift: float, seed: int, reps: int, block_size=DEFAULT_BLOCK, workers=1) -> SimResult:
    """Cumulative crossing rates of correlated Gaussian increments."""
    upper, lower = _bounds(design)
    t = np.asarray(design.info_fractions, float)
    c = run_blocks(_gauss_kernel, reps, seed, block_size, workers, t=t, drift=drift, upper=upper, lower=lower)
    return _gs_result(c, design.k, reps)


def _entry_times(rng, n, sc: SurvivalScenario):
    u = rng.random(n)
    h = 1.0 / (sc.enroll_duration - sc.ramp_duration / 2.0)
    r = sc.ramp_duration
    cut = h * r / 2.0
    with np.errstate(invalid="ignore"):
        ramp = np.sqrt(2.0 * r * u / h) if r > 0 else np.zeros(n)
    return np.where(u <= cut, ramp, r + (u - cut) / h)


def _logrank_z(entry, t_ev, t_drop, arm, tau):
    """Log-rank z (positive favours treatment) at calendar time ``tau`` per row."""
    tau = tau[:, None]
    entered = entry < tau
    follow = np.where(entered, tau - entry, -1.0)
    x = np.minimum(np.minimum(t_ev, t_drop), follow)
    event = entered & (t_ev <= t_drop) & (t_ev <= follow)
    x = np.where(entered, x, -1.0)
    order = np.argsort(x, axis=1, kind="stable")
    ev = np.take_along_axis(event, order, axis=1)
    tr = np.take_along_axis(arm, order, axis=1).astype(float)
    n_sub = x.shape[1]
    at_risk = (n_sub - np.arange(n_sub))[None, :].astype(float)
    at_risk_tr = np.cumsum(tr[:, ::-1], axis=1)[:, ::-1]
    frac = at_risk_tr / at_risk
    o_minus_e = np.sum(ev * (tr - frac), axis=1)
    var = np.sum(ev * frac * (1.0 - frac), axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(var > 0, -o_minus_e / np.sqrt(var), 0.0)


def _survival_kernel(rng, n, sc, hr, n_subjects, events, upper, lower):
    entry = _entry_times(rng, n * n_subjects, sc).reshape(n, n_subjects)
    arm = np.broadcast_to(np.arange(n_subjects) % 2 == 1, (n, n_subjects))
    lam = np.where(arm, sc.hazard_control * hr, sc.hazard_control)
    t_ev = rng.standard_exponential((n, n_subjects)) / lam
    if sc.dropout_rate > 0:
        t_drop = rng.standard_exponential((n, n_subjects)) / sc.dropout_rate
    else:
        t_drop = np.full((n, n_subjects), np.inf)
    cal = np.where(t_ev <= t_drop, entry + t_ev, np.inf)
    cal_sorted = np.sort(cal, axis=1)
    n_finite = np.isfinite(cal_sorted).sum(axis=1)
    last = np.take_along_axis(cal_sorted, np.maximum(n_finite - 1, 0)[:, None], axis=1)[:, 0]
    z = np.empty((n, len(events)))
    for j, d in enumerate(events):
        tau = np.where(n_finite >= d, cal_sorted[:, min(d, n_subjects) - 1], last)
        z[:, j] = _logrank_z(entry, t_ev, t_drop, arm, tau)
    return _crossings(z, upper, lower)


def simulate_gs_survival(
    design: GSDesign, scenario: SurvivalScenario, hr: float, n_subjects: int,
    seed: int, reps: int, block_size=SURVIVAL_BLOCK, workers=1,
) -> SimResult:
    """Per-subject trial simulation with log-rank tests at event-count triggers.

    Subjects enter by the scenario's accrual curve and alternate arms in order
    of enrollment (1:1). Analysis ``k`` happens when the ``events[k]``-th event
    occurs; if it never occurs, the last event time is used.
    """
    upper, lower = _bounds(design)
    c = run_blocks(_survival_kernel, reps, seed, block_size, workers, sc=scenario, hr=hr,
                   n_subjects=int(n_subjects), events=list(design.events), upper=upper, lower=lower)
    return _gs_result(c, design.k, reps)


# -- dispatcher ----------------------------------------------------------------


def _binomial_truth(cfg: SimConfig):
    if cfg.truth == "H0":
        p = cfg.p0
    elif cfg.truth == "H1":
        p = cfg.p1
    else:
        p = cfg.truth
    if p is None:
        raise ConfigError("truth needs p0/p1 or an explicit response rate")
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"response rate {p} outside [0, 1]")
    return p


def simulate(cfg: SimConfig) -> SimResult:
    """Simulate the configured design and return empirical characteristics.

    Raises:
        ConfigError: For invalid or incomplete configurations.
    """
    if not isinstance(cfg.seed, (int, np.integer)) or not 0 <= int(cfg.seed) < 2**64:
        raise ConfigError("seed must be a 64-bit nonnegative integer")
    if cfg.replicates < 1:
        raise ConfigError("replicates must be at least 1")
    d = cfg.design
    kw = dict(seed=int(cfg.seed), reps=int(cfg.replicates), workers=cfg.workers)
    if isinstance(d, SimonDesign):
        return simulate_simon(d, _binomial_truth(cfg), block_size=cfg.block_size or DEFAULT_BLOCK, **kw)
    if isinstance(d, SingleArmDesign):
        return simulate_single_arm(d, _binomial_truth(cfg), p0=cfg.p0,
                                   block_size=cfg.block_size or DEFAULT_BLOCK, **kw)
    if isinstance(d, TwoArmDesign):
        s = d.scenario
        if cfg.truth == "H0":
            pc = pt = s.p_control
        elif cfg.truth == "H1":
            pc, pt = s.p_control, s.p_treat
        else:
            pc, pt = (float(v) for v in cfg.truth)
        return simulate_two_arm(s, d.n_total, yates=d.yates, p_control=pc, p_treat=pt,
                                block_size=cfg.block_size or DEFAULT_BLOCK, **kw)
    if isinstance(d, GSDesign):
        if cfg.truth == "H0":
            hr = 1.0
        elif cfg.truth == "H1":
            hr = d.hr_alt
        else:
            hr = float(cfg.truth)
        if cfg.scenario is None:
            drift = d.drift * math.log(hr) / math.log(d.hr_alt)
            return simulate_gs_gaussian(d, drift, block_size=cfg.block_size or DEFAULT_BLOCK, **kw)
        n_sub = subjects_for_events(cfg.scenario, d.events[-1]).n_subjects
        n_sub += n_sub % 2
        return simulate_gs_survival(d, cfg.scenario, hr, n_sub,
                                    block_size=cfg.block_size or SURVIVAL_BLOCK, **kw)
    raise ConfigError(f"unsupported design payload {type(d).__name__}")
