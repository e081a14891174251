"""Registered analytic-versus-simulation comparisons behind ``bacs verify``.

Each check pairs an analytic operating characteristic with a seeded
simulation of the same design and an approximation slack. Exact analytic
values carry zero slack. Approximations (the pooled normal two-arm power,
the drift model for log-rank trials) carry the slack stated next to them.
Arcsine single-arm values are normal approximations to a lattice test; their
gaps are reported as informational and do not count toward the verdict.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Callable

from ..gs import SpendingFunction, SurvivalScenario, design_gs, gs_power
from ..gs.accrual import subjects_for_events
from ..simon import SimonDesign, evaluate_design
from ..single_arm import design_single_arm
from ..two_arm import TwoArmScenario, power_two_proportion
from .compare import Verdict, compare
from .exact import chisq_power_exact
from .simulate import (
    simulate_gs_gaussian,
    simulate_gs_survival,
    simulate_simon,
    simulate_single_arm,
    simulate_two_arm,
)

__all__ = ["Check", "build_registry", "run_registry", "report_json", "failures", "SLACK", "GROUPS"]

GROUPS = ("simon", "single_arm", "two_arm", "gs_gaussian", "gs_survival")

P0, P1 = 0.10, 0.22
SIMON_DESIGNS = ((21, 2, 66, 10), (29, 3, 73, 11), (36, 4, 98, 14))

SLACK = {
    "exact": 0.0,
    "arcsine_power": 0.005,
    "arcsine_size": 0.01,
    "two_arm_normal": 0.005,
    "logrank": 0.01,
}


@dataclass
class Check:
    """One registered comparison.

    ``run(seed, reps)`` returns ``(rate, se)``; ``analytic()`` returns the
    value under test. Informational checks are reported but never fail the
    suite.
    """

    name: str
    analytic: Callable[[], float]
    run: Callable[[int, int], tuple[float, float]]
    slack: float
    group: str
    informational: bool = False


def _simon_checks():
    out = []
    for tup in SIMON_DESIGNS:
        d = SimonDesign(*tup)
        props = evaluate_design(d, P0, P1)
        tag = "simon" + "".join(f"_{v}" for v in tup)

        def rate(seed, reps, d=d, p=P0):
            r = simulate_simon(d, p, seed, reps)
            return r.positive_rate, r.se

        def power(seed, reps, d=d):
            r = simulate_simon(d, P1, seed, reps)
            return r.positive_rate, r.se

        def pet(seed, reps, d=d):
            r = simulate_simon(d, P0, seed, reps)
            return r.early_stop_rate, r.early_stop_se

        def en(seed, reps, d=d):
            r = simulate_simon(d, P0, seed, reps)
            return r.mean_sample_size, r.mean_sample_size_se

        out += [
            Check(f"{tag}/alpha", lambda p=props: p.attained_alpha, rate, SLACK["exact"], "simon"),
            Check(f"{tag}/power", lambda p=props: p.attained_power, power, SLACK["exact"], "simon"),
            Check(f"{tag}/pet0", lambda p=props: p.pet0, pet, SLACK["exact"], "simon"),
            Check(f"{tag}/en0", lambda p=props: p.en0, en, SLACK["exact"], "simon"),
        ]
    return out


def _single_arm_checks():
    out = []
    for n in (70, 95):
        ex = design_single_arm(P0, P1, 0.05, n, method="exact")
        ar = design_single_arm(P0, P1, 0.05, n, method="arcsine")

        def sim(d, p, p0=None):
            def f(seed, reps):
                r = simulate_single_arm(d, p, seed, reps, p0=p0)
                return r.positive_rate, r.se
            return f

        out += [
            Check(f"single_arm_exact_n{n}/size", lambda d=ex: 1.0 - d.attained_spec, sim(ex, P0), SLACK["exact"], "single_arm"),
            Check(f"single_arm_exact_n{n}/power", lambda d=ex: d.attained_sens, sim(ex, P1), SLACK["exact"], "single_arm"),
            Check(f"single_arm_arcsine_n{n}/size", lambda d=ar: 1.0 - d.attained_spec, sim(ar, P0, P0),
                  SLACK["arcsine_size"], "single_arm", informational=True),
            Check(f"single_arm_arcsine_n{n}/power", lambda d=ar: d.attained_sens, sim(ar, P1, P0),
                  SLACK["arcsine_power"], "single_arm", informational=True),
        ]
    return out


def _two_arm_checks():
    s = TwoArmScenario(P0, P1)
    out = []
    for n in (200, 300, 370, 380, 500):
        def sim(seed, reps, n=n):
            r = simulate_two_arm(s, n, seed, reps)
            return r.positive_rate, r.se

        out += [
            Check(f"two_arm_n{n}/exact_chisq", lambda n=n: chisq_power_exact(s, n), sim, SLACK["exact"], "two_arm"),
            Check(f"two_arm_n{n}/normal_approx", lambda n=n: power_two_proportion(s, n).power, sim,
                  SLACK["two_arm_normal"], "two_arm"),
        ]
    return out


def table4_designs():
    """The two-look OBF and Pocock designs of the survival scenario, with futility."""
    sc = SurvivalScenario(dropout_rate=0.01)
    return sc, {
        fam: design_gs(SpendingFunction(fam), [0.5, 1.0], 0.67, 0.9, scenario=sc)
        for fam in ("obf", "pocock")
    }


def _gs_checks():
    sc, designs = table4_designs()
    out = []
    for fam, d in designs.items():
        for truth, drift, hr in (("H0", 0.0, 1.0), ("H1", d.drift, d.hr_alt)):
            pw = gs_power(d.z_bounds, d.info_fractions, drift, d.futility_bounds)
            cache: dict = {}

            def gauss(seed, reps, d=d, drift=drift, cache=cache):
                key = ("g", seed, reps)
                if key not in cache:
                    cache[key] = simulate_gs_gaussian(d, drift, seed, reps)
                return cache[key]

            def surv(seed, reps, d=d, hr=hr, cache=cache):
                key = ("s", seed, reps)
                if key not in cache:
                    n_sub = subjects_for_events(sc, d.events[-1]).n_subjects
                    cache[key] = simulate_gs_survival(d, sc, hr, n_sub + n_sub % 2, seed, reps)
                return cache[key]

            for k in range(d.k):
                def g(seed, reps, k=k, f=gauss):
                    r = f(seed, reps)
                    return r.cumulative_rates[k], r.cumulative_se[k]

                def s_(seed, reps, k=k, f=surv):
                    r = f(seed, reps)
                    return r.cumulative_rates[k], r.cumulative_se[k]

                val = float(pw.cumulative[k])
                out.append(Check(f"gs_{fam}_{truth}/stage{k + 1}/recursion", lambda v=val: v, g,
                                 SLACK["exact"], "gs_gaussian"))
                out.append(Check(f"gs_{fam}_{truth}/stage{k + 1}/logrank", lambda v=val: v, s_,
                                 SLACK["logrank"], "gs_survival"))
    return out


def build_registry() -> list[Check]:
    """Every registered comparison, in report order."""
    return _simon_checks() + _single_arm_checks() + _two_arm_checks() + _gs_checks()


def run_registry(
    checks: list[Check] | None = None,
    seed: int = 20240501,
    reps: int = 1_000_000,
    survival_reps: int | None = None,
    groups: set[str] | None = None,
) -> list[dict]:
    """Run checks and return verdict records with timing.

    Args:
        checks: Defaults to the full registry.
        seed: Master seed shared by all checks.
        reps: Replicates per simulation.
        survival_reps: Replicates for per-subject log-rank simulations
            (defaults to ``reps``).
        groups: Restrict to these check groups.
    """
    checks = build_registry() if checks is None else checks
    out = []
    for c in checks:
        if groups is not None and c.group not in groups:
            continue
        n = survival_reps if (c.group == "gs_survival" and survival_reps is not None) else reps
        t0 = time.perf_counter()
        rate, se = c.run(seed, n)
        v: Verdict = compare(c.analytic(), rate, se, c.slack, c.name)
        rec = v.to_dict()
        rec.update(group=c.group, informational=c.informational, replicates=n,
                   seconds=round(time.perf_counter() - t0, 3))
        out.append(rec)
    return out


def report_json(records: list[dict]) -> str:
    """Verdict report with a summary header."""
    failed = failures(records)
    info = [r["name"] for r in records if r.get("informational") and not r["passed"]]
    doc = {"n_checks": len(records), "n_failed": len(failed), "failed": failed,
           "informational_outside_slack": info, "checks": records}
    return json.dumps(doc, indent=2, sort_keys=True, default=_finite)


def failures(records: list[dict]) -> list[str]:
    """Names of counted checks that failed."""
    return [r["name"] for r in records if not r["passed"] and not r.get("informational")]


def _finite(x):
    return None if isinstance(x, float) and not math.isfinite(x) else float(x)
