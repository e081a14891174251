"""Command-line front end.

Each subcommand reads options from, in increasing priority: built-in
defaults, ``--preset``, the subcommand's section of a ``--config`` JSON file,
and command-line flags. Output goes to stdout or to ``--out``; relative
``--out`` paths resolve against ``$BACS_OUTPUT_DIR`` when it is set.

Exit codes: 0 success, 1 internal error, 2 invalid input, 3 infeasible
design, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import jsonschema

from .core import DesignPrior, EvidenceThresholds, THRESHOLD_PRESETS
from .errors import BacsError, ConfigError, DomainError, InfeasibleDesignError
from .report import emit_table

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_VERIFY = 0, 1, 2, 3, 4
OUTPUT_DIR_ENV = "BACS_OUTPUT_DIR"


@dataclass(frozen=True)
class Opt:
    """One option: its flag, config key (``dest``), type and default."""

    dest: str
    type: str  # number | integer | string | boolean | numbers | integers | strings
    default: Any = None
    help: str = ""
    choices: tuple | None = None

    @property
    def flag(self) -> str:
        return "--" + self.dest.replace("_", "-")


_COMMON = [
    Opt("format", "string", "csv", "output format", ("csv", "json")),
    Opt("out", "string", None, "output file (default stdout)"),
]
_THRESH = [
    Opt("tau_n", "number", THRESHOLD_PRESETS["confirmatory"].tau_n, "negative-evidence threshold"),
    Opt("tau_p", "number", THRESHOLD_PRESETS["confirmatory"].tau_p, "positive-evidence threshold"),
]
_SCENARIO = [
    Opt("median_control", "number", 10.0, "control-arm median event time (months)"),
    Opt("enroll_duration", "number", 24.0, "enrollment duration (months)"),
    Opt("ramp_duration", "number", 6.0, "linear ramp-up of enrollment (months)"),
    Opt("min_followup", "number", 12.0, "follow-up after last enrollment (months)"),
    Opt("dropout_rate", "number", 0.0, "exponential dropout hazard per month"),
]

OPTIONS: dict[str, list[Opt]] = {
    "bacs-table": _COMMON + [
        Opt("preset", "string", None, "reference grid", ("paper",)),
        Opt("r01", "numbers", None, "pre-study odds values"),
        Opt("specificity", "numbers", None, "specificities, paired with --sensitivity"),
        Opt("sensitivity", "numbers", None, "sensitivities, paired with --specificity"),
    ],
    "prior": _COMMON + [
        Opt("prior_a", "number", 1.0, "Beta prior shape a"),
        Opt("prior_b", "number", 1.0, "Beta prior shape b"),
        Opt("n", "integer", None, "phase-I participants"),
        Opt("responders", "integer", None, "phase-I responders"),
        Opt("urr", "number", 0.10, "unacceptable response rate"),
        Opt("trr", "number", None, "target response rate (default: most conservative summary)"),
        Opt("ci_level", "number", 0.95, "equal-tails interval level"),
        Opt("curve", "boolean", False, "emit the posterior density curve instead"),
        Opt("curve_points", "integer", 201, "grid points of the density curve"),
    ],
    "simon": _COMMON + [
        Opt("preset", "string", None, "reference designs", ("paper",)),
        Opt("p0", "number", 0.10, "null response rate"),
        Opt("p1", "number", 0.22, "alternative response rate"),
        Opt("alpha", "number", 0.05, "type-I error"),
        Opt("power", "numbers", [0.80, 0.85, 0.90], "target powers, one design each"),
        Opt("n_max", "integer", 150, "largest total size searched"),
        Opt("r01", "number", 0.56, "pre-study odds"),
        Opt("criterion", "string", "optimal", "design criterion", ("optimal", "minimax")),
        Opt("mode", "string", "nominal", "BACs from nominal or attained error rates", ("nominal", "attained")),
        Opt("workers", "integer", 1, "search threads"),
    ],
    "single-arm": _COMMON + _THRESH + [
        Opt("preset", "string", None, "reference table", ("paper",)),
        Opt("p0", "number", 0.10, "null response rate"),
        Opt("p1", "number", 0.22, "alternative response rate"),
        Opt("alpha", "number", 0.05, "two-sided type-I error of the test"),
        Opt("n", "integers", [70, 75, 80, 85, 90, 95], "sample sizes to tabulate"),
        Opt("method", "string", "exact", "power computation", ("exact", "arcsine")),
        Opt("mode", "string", "nominal", "BACs from nominal or attained specificity", ("nominal", "attained")),
        Opt("r01", "number", 0.56, "pre-study odds"),
        Opt("min_n", "boolean", False, "report the smallest strong-BACs size instead"),
        Opt("n_min", "integer", 50, "smallest size scanned by --min-n"),
        Opt("n_max", "integer", 150, "largest size scanned by --min-n"),
        Opt("n_step", "integer", 5, "scan step of --min-n"),
    ],
    "two-arm": _COMMON + _THRESH + [
        Opt("preset", "string", None, "reference curve", ("paper",)),
        Opt("p_control", "number", 0.10, "control response rate"),
        Opt("p_treat", "number", 0.22, "treatment response rate"),
        Opt("alpha", "number", 0.05, "two-sided type-I error"),
        Opt("r01", "numbers", [1.0, 0.56], "pre-study odds values"),
        Opt("n_min", "integer", 100, "smallest total size"),
        Opt("n_max", "integer", 500, "largest total size"),
        Opt("n_step", "integer", 10, "grid step (even)"),
        Opt("min_n", "boolean", False, "report the smallest strong-BACs size per prior instead"),
        Opt("method", "string", "normal_approx", "power computation", ("normal_approx", "simulated_chisq")),
        Opt("reps", "integer", 1_000_000, "replicates for simulated_chisq"),
        Opt("seed", "integer", 20240501, "seed for simulated_chisq"),
        Opt("yates", "boolean", False, "continuity-corrected test (simulated_chisq only)"),
    ],
    "gs": _COMMON + _SCENARIO + [
        Opt("preset", "string", None, "reference scenario", ("paper",)),
        Opt("spending", "strings", ["obf", "pocock"], "spending families", ("obf", "pocock")),
        Opt("info_fractions", "numbers", [0.5, 1.0], "analysis information fractions"),
        Opt("hr_alt", "number", 0.67, "alternative hazard ratio"),
        Opt("power", "number", 0.9, "target power"),
        Opt("alpha", "number", 0.05, "two-sided type-I error"),
        Opt("r01", "number", 1.0, "pre-study odds"),
        Opt("futility", "string", "beta_spending", "futility boundary", ("beta_spending", "none")),
        Opt("include_fixed", "boolean", True, "append the fixed-design row"),
        Opt("prob_decimals", "integer", None, "round crossing probabilities before forming odds"),
        Opt("futility_hr", "numbers", None, "interim futility HR boundaries, one per family; reports futility evidence"),
    ],
    "verify": _COMMON + [
        Opt("reps", "integer", 1_000_000, "replicates per simulation"),
        Opt("survival_reps", "integer", None, "replicates for log-rank simulations (default --reps)"),
        Opt("seed", "integer", 20240501, "master seed"),
        Opt("groups", "strings", None, "check groups to run",
            ("simon", "single_arm", "two_arm", "gs_gaussian", "gs_survival")),
    ],
}

PRESETS: dict[str, dict[str, Any]] = {
    "bacs-table": {},
    "simon": {"power": [0.80, 0.85, 0.90], "r01": 0.56, "n_max": 150},
    "single-arm": {"method": "arcsine", "n": [70, 75, 80, 85, 90, 95], "r01": 0.56},
    "two-arm": {"r01": [1.0, 0.56], "n_min": 100, "n_max": 500, "n_step": 10},
    "gs": {"dropout_rate": 0.01, "prob_decimals": 4, "spending": ["obf", "pocock"], "r01": 1.0},
}

_JSON_TYPES = {
    "number": {"type": "number"},
    "integer": {"type": "integer"},
    "string": {"type": "string"},
    "boolean": {"type": "boolean"},
    "numbers": {"type": "array", "items": {"type": "number"}, "minItems": 1},
    "integers": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
    "strings": {"type": "array", "items": {"type": "string"}, "minItems": 1},
}


def build_schema() -> dict:
    """JSON schema of the config file: one section per subcommand."""
    sections = {}
    for cmd, opts in OPTIONS.items():
        props = {}
        for o in opts:
            s = dict(_JSON_TYPES[o.type])
            if o.choices:
                if o.type == "strings":
                    s["items"] = dict(s["items"], enum=list(o.choices))
                else:
                    s["enum"] = list(o.choices)
            if o.help:
                s["description"] = o.help
            props[o.dest] = s
        sections[cmd] = {"type": "object", "properties": props, "additionalProperties": False}
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "bacs run configuration",
        "type": "object",
        "properties": {"version": {"const": 1}, **sections},
        "additionalProperties": False,
    }


def load_schema() -> dict:
    return json.loads(resources.files("bacs").joinpath("schema/config.schema.json").read_text())


def load_config(path: str, command: str) -> dict:
    """Validated section of ``path`` for ``command`` (empty if absent).

    Raises:
        ConfigError: On unreadable, malformed or schema-violating files.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from None
    try:
        jsonschema.validate(doc, load_schema())
    except jsonschema.ValidationError as e:
        loc = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"config {path} at {loc}: {e.message}") from None
    return dict(doc.get(command, {}))


def _add_opt(p: argparse.ArgumentParser, o: Opt) -> None:
    kw: dict[str, Any] = {"dest": o.dest, "default": argparse.SUPPRESS, "help": o.help}
    if o.type == "boolean":
        p.add_argument(o.flag, action=argparse.BooleanOptionalAction, **kw)
        return
    base = {"number": float, "integer": int, "string": str}
    scalar = o.type.rstrip("s")
    kw["type"] = base[scalar]
    if o.type.endswith("s"):
        kw["nargs"] = "+"
    if o.choices:
        kw["choices"] = o.choices
    p.add_argument(o.flag, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bacs", description="Bayesian characteristics of clinical trial designs")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, opts in OPTIONS.items():
        p = sub.add_parser(cmd, help=_HELP[cmd])
        p.add_argument("--config", default=None, help="JSON config file (see schema/config.schema.json)")
        for o in opts:
            _add_opt(p, o)
    return parser


_HELP = {
    "bacs-table": "post-study odds over a grid of priors and operating characteristics",
    "prior": "Beta posterior summaries and density-ratio pre-study odds",
    "simon": "optimal or minimax Simon two-stage designs with BACs",
    "single-arm": "exact single-arm designs with BACs",
    "two-arm": "two-arm binary evidence curve and minimum size",
    "gs": "group-sequential survival designs with stage-wise BACs",
    "verify": "run the registered Monte Carlo oracle comparisons",
}


def resolve_options(command: str, ns: argparse.Namespace) -> dict[str, Any]:
    """Merge defaults, preset, config section and flags."""
    opts = {o.dest: o.default for o in OPTIONS[command]}
    given = {k: v for k, v in vars(ns).items() if k not in ("command", "config")}
    cfg = load_config(ns.config, command) if ns.config else {}
    preset = given.get("preset", cfg.get("preset"))
    if preset is not None:
        opts.update(PRESETS.get(command, {}))
    opts.update(cfg)
    opts.update(given)
    return opts


def _out_path(out: str | None) -> Path | None:
    if out is None:
        return None
    p = Path(out)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if not p.is_absolute() and base:
        p = Path(base) / p
    return p


def _write(data: bytes, out: str | None) -> None:
    path = _out_path(out)
    if path is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def _emit(table, o) -> None:
    _write(emit_table(table.rows, o["format"], table.policy, table.columns), o["out"])


def _thresholds(o) -> EvidenceThresholds:
    return EvidenceThresholds(o["tau_n"], o["tau_p"])


# -- subcommands ---------------------------------------------------------------


def cmd_bacs_table(o) -> int:
    from .core import bacs_table
    from .tables import Table, table1

    custom = o["r01"] is not None or o["specificity"] is not None or o["sensitivity"] is not None
    if o["preset"] == "paper" or not custom:
        _emit(table1(), o)
        return EXIT_OK
    if o["r01"] is None or o["specificity"] is None or o["sensitivity"] is None:
        raise ConfigError("a custom grid needs --r01, --specificity and --sensitivity")
    if len(o["specificity"]) != len(o["sensitivity"]):
        raise ConfigError("--specificity and --sensitivity must have equal lengths")
    base = table1()
    rows = bacs_table(o["r01"], list(zip(o["specificity"], o["sensitivity"])))
    _emit(Table(rows, base.columns, base.policy), o)
    return EXIT_OK


def cmd_prior(o) -> int:
    from .prior import (
        BetaPosterior,
        PhaseOneData,
        RateHypotheses,
        density_curve,
        density_ratio_odds,
        posterior_from_binomial,
        posterior_summaries,
        suggest_trr,
    )
    from .tables import Table

    if o["n"] is None or o["responders"] is None:
        raise ConfigError("prior needs --n and --responders")
    post = posterior_from_binomial(BetaPosterior(o["prior_a"], o["prior_b"]), PhaseOneData(o["n"], o["responders"]))
    if o["curve"]:
        _emit(Table(density_curve(post, o["curve_points"]), ["x", "density"], {"x": "dec6", "density": "dec6"}), o)
        return EXIT_OK
    s = posterior_summaries(post, o["ci_level"])
    trr = o["trr"] if o["trr"] is not None else suggest_trr(post)[0]
    r01 = density_ratio_odds(post, RateHypotheses(o["urr"], trr)).r01
    row = dict(a=post.a, b=post.b, mean=s.mean, median=s.median, mode=s.mode, ci_lo=s.ci_lo, ci_hi=s.ci_hi,
               urr=o["urr"], trr=trr, r01=r01)
    cols = list(row)
    policy = {c: "dec4" for c in cols}
    policy.update(a="raw", b="raw")
    _emit(Table([row], cols, policy), o)
    return EXIT_OK


def cmd_simon(o) -> int:
    from .simon import search_optimal, simon_bacs
    from .tables import Table, table2, table2_deviations

    if o["criterion"] == "optimal" and o["mode"] == "nominal":
        t = table2(o["r01"], o["power"], o["alpha"], o["p0"], o["p1"], o["n_max"], o["workers"])
        for msg in table2_deviations(t.rows):
            print(msg, file=sys.stderr)
        _emit(t, o)
        return EXIT_OK
    base = table2()
    rows = []
    for pw in o["power"]:
        res = search_optimal(o["p0"], o["p1"], o["alpha"], 1.0 - pw, n_max=o["n_max"], workers=o["workers"])
        pick = res.optimal if o["criterion"] == "optimal" else res.minimax
        d, props = pick.design, pick.properties
        b = simon_bacs(props, DesignPrior(o["r01"]), o["mode"], o["alpha"], 1.0 - pw)
        b1 = simon_bacs(props, DesignPrior(1.0), o["mode"], o["alpha"], 1.0 - pw)
        spec, sens = ((1.0 - o["alpha"], pw) if o["mode"] == "nominal"
                      else (1.0 - props.attained_alpha, props.attained_power))
        rows.append(dict(specificity=spec, sensitivity=sens, n1=d.n1, r1=d.r1, nf=d.nf, rf=d.rf,
                         en=props.en0, pet=props.pet0, neg_odds_prior=b.neg_odds, pos_odds_prior=b.pos_odds,
                         neg_odds_equal=b1.neg_odds, pos_odds_equal=b1.pos_odds))
    policy = dict(base.policy)
    if o["mode"] == "attained":
        policy.update(specificity="pct1", sensitivity="pct1")
    _emit(Table(rows, base.columns, policy), o)
    return EXIT_OK


def cmd_single_arm(o) -> int:
    from .single_arm import design_bacs, design_single_arm, min_n_for_bacs
    from .tables import Table, table3

    prior = DesignPrior(o["r01"])
    if o["min_n"]:
        res = min_n_for_bacs(o["p0"], o["p1"], o["alpha"], prior, _thresholds(o),
                             range(o["n_min"], o["n_max"] + 1, o["n_step"]), o["method"], o["mode"])
        d = res.design
        row = dict(n=res.n, specificity=d.attained_spec if o["mode"] == "attained" else 1.0 - o["alpha"],
                   sensitivity=d.attained_sens, critical_k=d.critical_k,
                   neg_odds=res.bacs.neg_odds, pos_odds=res.bacs.pos_odds)
        base = table3(ns=[res.n])
        _emit(Table([row], base.columns, base.policy), o)
        return EXIT_OK
    if o["mode"] == "nominal":
        _emit(table3(o["r01"], o["n"], o["alpha"], o["p0"], o["p1"], o["method"]), o)
        return EXIT_OK
    base = table3(ns=o["n"][:1])
    rows = []
    for n in o["n"]:
        d = design_single_arm(o["p0"], o["p1"], o["alpha"], n, o["method"])
        b = design_bacs(d, prior, "attained")
        rows.append(dict(n=n, specificity=d.attained_spec, sensitivity=d.attained_sens,
                         critical_k=d.critical_k, neg_odds=b.neg_odds, pos_odds=b.pos_odds))
    _emit(Table(rows, base.columns, dict(base.policy, specificity="pct1")), o)
    return EXIT_OK


def cmd_two_arm(o) -> int:
    from .core import OperatingCharacteristics, post_study_odds
    from .tables import Table, figure3
    from .two_arm import TwoArmScenario, min_n_for_bacs, power_two_proportion

    grid = range(o["n_min"], o["n_max"] + 1, o["n_step"])
    s = TwoArmScenario(o["p_control"], o["p_treat"], o["alpha"])
    if o["min_n"]:
        rows = []
        for r in o["r01"]:
            res = min_n_for_bacs(s, DesignPrior(r), _thresholds(o), grid)
            rows.append(dict(r01=r, n_total=res.n_total, power=res.power,
                             neg_odds=res.bacs.neg_odds, pos_odds=res.bacs.pos_odds))
        _emit(Table(rows, ["r01", "n_total", "power", "neg_odds", "pos_odds"],
                    {"r01": "sig3", "power": "dec6", "neg_odds": "dec6", "pos_odds": "dec6"}), o)
        return EXIT_OK
    if o["method"] == "normal_approx":
        if o["yates"]:
            raise ConfigError("--yates applies only to --method simulated_chisq")
        _emit(figure3(o["r01"], grid, o["p_control"], o["p_treat"], o["alpha"]), o)
        return EXIT_OK
    rows = []
    for n in grid:
        est = power_two_proportion(s, n, "simulated_chisq", seed=o["seed"], reps=o["reps"], yates=o["yates"])
        for r in o["r01"]:
            b = post_study_odds(DesignPrior(r), OperatingCharacteristics(1.0 - o["alpha"], est.power))
            rows.append(dict(r01=r, n=n, power=est.power, power_se=est.se, neg_odds=b.neg_odds, pos_odds=b.pos_odds))
    _emit(Table(rows, ["r01", "n", "power", "power_se", "neg_odds", "pos_odds"],
                {"r01": "sig3", "power": "dec6", "power_se": "dec6", "neg_odds": "dec6", "pos_odds": "dec6"}), o)
    return EXIT_OK


def cmd_gs(o) -> int:
    from .gs import SpendingFunction, SurvivalScenario, design_gs, futility_analysis
    from .tables import Table, gs_table

    sc = SurvivalScenario(o["median_control"], o["hr_alt"], o["enroll_duration"], o["ramp_duration"],
                          o["min_followup"], o["dropout_rate"])
    futility = None if o["futility"] == "none" else o["futility"]
    if o["futility_hr"] is not None:
        if len(o["futility_hr"]) != len(o["spending"]):
            raise ConfigError("--futility-hr needs one value per spending family")
        rows = []
        for fam, hr_f in zip(o["spending"], o["futility_hr"]):
            d = design_gs(SpendingFunction(fam, o["alpha"]), o["info_fractions"], o["hr_alt"], o["power"],
                          futility, sc)
            r = futility_analysis(hr_f, d.events[0], d.drift, d.info_fractions[0], DesignPrior(o["r01"]))
            rows.append(dict(design=d.spending.family, events=d.events[0], hr_futility=hr_f, z_futility=r.z_futility,
                             p_h0=r.p_cross_h0, p_h1=r.p_cross_h1, likelihood_ratio=r.likelihood_ratio,
                             updated_neg_odds=r.updated_neg_odds))
        cols = list(rows[0])
        _emit(Table(rows, cols, {"z_futility": "dec4", "p_h0": "pct1", "p_h1": "pct1",
                                 "likelihood_ratio": "sig3", "updated_neg_odds": "sig3"}), o)
        return EXIT_OK
    t = gs_table(o["spending"], o["info_fractions"], o["hr_alt"], o["power"], o["alpha"], o["r01"], sc,
                 futility, o["include_fixed"], o["prob_decimals"])
    _emit(t, o)
    return EXIT_OK


def cmd_verify(o) -> int:
    from .oracle.registry import failures, report_json, run_registry

    groups = set(o["groups"]) if o["groups"] else None
    recs = run_registry(seed=o["seed"], reps=o["reps"], survival_reps=o["survival_reps"], groups=groups)
    if o["format"] == "json":
        data = (report_json(recs) + "\n").encode()
    else:
        cols = ["name", "group", "informational", "analytic", "simulated", "se", "slack", "gap", "allowed",
                "passed", "replicates", "seconds"]
        data = emit_table(recs, "csv", None, cols)
    _write(data, o["out"])
    failed = failures(recs)
    for name in failed:
        print(f"verification failed: {name}", file=sys.stderr)
    return EXIT_VERIFY if failed else EXIT_OK


COMMANDS = {
    "bacs-table": cmd_bacs_table,
    "prior": cmd_prior,
    "simon": cmd_simon,
    "single-arm": cmd_single_arm,
    "two-arm": cmd_two_arm,
    "gs": cmd_gs,
    "verify": cmd_verify,
}


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, execute the subcommand and return its exit code."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_INVALID
    try:
        opts = resolve_options(ns.command, ns)
        return COMMANDS[ns.command](opts)
    except InfeasibleDesignError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, DomainError, ValueError) as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    except BacsError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
