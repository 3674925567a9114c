"""Command-line front end: seeded experiments in, plot-ready CSVs out.

Subcommands map one-to-one onto the library's experiment harnesses:

  bounds    stopping-time Monte Carlo against the two-sided cost bound
  slope     noise sweep of the slope-identification experiment
  coloring  random-graph coloring campaign with all three agents
  estimate  a-priori cost estimation for a linear identification task
  approx    goal-set geometry of a bundled knapsack across relaxations

Every run is a pure function of its flags and --seed: repeating a command
reproduces its CSV output byte for byte, regardless of --workers. Options
may also come from a key=value file via --config; explicit flags win.

Exit codes: 0 success, 1 runtime failure (e.g. unwritable output),
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import approx, coloring, gp, slope, stopping

PROG = "acp"


def _float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("expected a non-empty comma-separated float list")
    return values


@dataclass(frozen=True)
class _Opt:
    flag: str
    conv: Callable[[str], object]
    default: object
    help: str
    choices: tuple | None = None

    @property
    def dest(self) -> str:
        return self.flag.lstrip("-").replace("-", "_")


_SHARED = (
    _Opt("--seed", int, 0, "master seed; all per-trial seeds derive from it"),
    _Opt("--out", str, None, "output CSV path"),
    _Opt("--format", str, "csv", "output format", choices=("csv",)),
    _Opt("--workers", int, 1, "worker processes (does not affect results)"),
)

_OPTIONS: dict[str, tuple[_Opt, ...]] = {
    "bounds": _SHARED
    + (
        _Opt("--trials", int, 10000, "Monte Carlo trials"),
        _Opt("--family", str, "exponential", "gain distribution family", choices=stopping.FAMILIES),
        _Opt("--i-total", float, 10.0, "total information requirement in bits"),
        _Opt("--mu", _float_list, (), "leading per-step means, comma-separated (may be empty)"),
        _Opt("--mu-inf", float, 1.0, "tail per-step mean"),
        _Opt("--m2", float, None, "second-moment bound override (default: exact family value)"),
        _Opt("--m", float, None, "support bound override (default: exact family value)"),
        _Opt("--scale", float, 0.5, "base scale of the truncated-gaussian family"),
        _Opt("--cs", float, 1.0, "cost per step"),
        _Opt("--delta", float, 0.05, "failure probability for the high-probability step budget"),
        _Opt("--dump-trials", str, None, "optional CSV path for per-trial records"),
    ),
    "slope": _SHARED
    + (
        _Opt("--trials", int, 50, "trials per noise level"),
        _Opt("--noise", _float_list, slope.DEFAULT_NOISE_LEVELS, "noise levels, comma-separated"),
        _Opt("--resolution", float, 0.1, "credible-interval width that counts as identified"),
        _Opt("--step-cap", int, 200, "maximum agent steps per trial"),
    ),
    "coloring": _SHARED
    + (
        _Opt("--configs", str, "default", "named configuration set", choices=("default",)),
        _Opt("--n", int, None, "vertex count (overrides --configs, requires --p/--k/--instances)"),
        _Opt("--p", float, None, "edge probability"),
        _Opt("--k", int, None, "number of colors"),
        _Opt("--instances", int, None, "feasible instances per configuration (>= 50)"),
    ),
    "estimate": _SHARED
    + (
        _Opt("--trials", int, 64, "simulated outcomes per candidate action"),
        _Opt("--noise", float, 0.5, "observation noise sigma"),
        _Opt("--lengthscale", float, 1.0, "surrogate kernel lengthscale"),
        _Opt("--signal-var", float, slope.DEFAULT_SIGNAL_VARIANCE, "surrogate kernel signal variance"),
        _Opt("--grid", int, 401, "hypothesis grid size"),
        _Opt("--resolution", float, 0.1, "identification resolution"),
        _Opt("--budget", float, 100.0, "resource budget to test against"),
    ),
    "approx": _SHARED
    + (
        _Opt("--trials", int, 1, "accepted for flag uniformity; enumeration is exact"),
        _Opt("--items", int, 10, "knapsack item count (<= 20)"),
        _Opt("--eps", _float_list, (0.0, 0.05, 0.1, 0.2, 0.5), "relaxation levels, ascending"),
    ),
}

_DEFAULT_OUT = {
    "bounds": "bounds.csv",
    "slope": "slope.csv",
    "coloring": "coloring.csv",
    "estimate": "estimate.csv",
    "approx": "approx.csv",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for command, opts in _OPTIONS.items():
        p = sub.add_parser(command)
        p.add_argument("--config", type=str, default=None, help="key=value option file; flags win")
        for opt in opts:
            default_note = "none" if opt.default is None else _plain(opt.default)
            kwargs = dict(type=opt.conv, default=None, help=f"{opt.help} (default: {default_note})")
            if opt.choices:
                kwargs["choices"] = opt.choices
            p.add_argument(opt.flag, **kwargs)
    return parser


def _plain(value) -> str:
    if isinstance(value, tuple):
        return ",".join(_plain(v) for v in value)
    return str(value)


def _read_config_file(path: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = line.split("=", 1)
            pairs[key.strip().replace("-", "_")] = value.strip()
    return pairs


def resolve_options(args: argparse.Namespace) -> dict:
    """Merge defaults, config-file entries, and explicit flags (flags win)."""
    table = {opt.dest: opt for opt in _OPTIONS[args.command]}
    merged = {dest: opt.default for dest, opt in table.items()}
    if args.config is not None:
        for key, raw in _read_config_file(args.config).items():
            if key not in table:
                raise ValueError(f"unknown config key {key!r} for subcommand {args.command!r}")
            opt = table[key]
            try:
                value = opt.conv(raw)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ValueError(f"config key {key!r}: {exc}") from exc
            if opt.choices and value not in opt.choices:
                raise ValueError(f"config key {key!r}: {value!r} not in {opt.choices}")
            merged[key] = value
    for dest in table:
        given = getattr(args, dest)
        if given is not None:
            merged[dest] = given
    if merged.get("out") is None:
        merged["out"] = _DEFAULT_OUT[args.command]
    if merged["seed"] < 0:
        raise ValueError("--seed must be non-negative")
    if merged["workers"] < 1:
        raise ValueError("--workers must be at least 1")
    return merged


def _format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6f}"
    return str(value)


def write_csv(path: str, header: list[str], rows: list[list]) -> None:
    """Deterministic CSV: LF newlines, '.' decimal point, 6-decimal reals."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(cell) for cell in row])


def _summary_path(out: str) -> str:
    base, ext = os.path.splitext(out)
    return base + "_summary" + (ext or ".csv")


# -- subcommand runners ---------------------------------------------------


def _build_gain_spec(o: dict) -> stopping.GainSequenceSpec:
    prefix, tail = tuple(o["mu"]), o["mu_inf"]
    family = o["family"]
    if family == "deterministic":
        spec = stopping.GainSequenceSpec.deterministic(prefix, tail)
    elif family == "exponential":
        spec = stopping.GainSequenceSpec.exponential(prefix, tail)
    elif family == "uniform":
        spec = stopping.GainSequenceSpec.uniform(prefix, tail)
    else:
        support = o["m"] if o["m"] is not None else 4.0 * (prefix[0] if prefix else tail)
        spec = stopping.GainSequenceSpec.truncated_gaussian(prefix, tail, support, o["scale"])
    overrides = {}
    if o["m2"] is not None:
        overrides["second_moment_bound"] = o["m2"]
    if o["m"] is not None and family != "truncated-gaussian":
        overrides["support_bound"] = o["m"]
    return replace(spec, **overrides) if overrides else spec


def run_bounds(o: dict) -> int:
    spec = _build_gain_spec(o)
    trials = stopping.run_trials(spec, o["i_total"], o["trials"], o["seed"], workers=o["workers"])
    report = stopping.summarize_trials(spec, o["i_total"], o["cs"], trials)
    write_csv(
        o["out"],
        ["lower", "upper", "empirical_mean_cost", "n_trials", "standard_error", "within_bounds"],
        [[report.lower, report.upper, report.empirical_mean_cost, report.n_trials,
          report.standard_error, report.within_bounds]],
    )
    if o["dump_trials"]:
        write_csv(
            o["dump_trials"],
            ["trial_id", "n_steps", "s_n", "overshoot"],
            [[i, t.n_steps, t.accumulated, t.overshoot] for i, t in enumerate(trials)],
        )
    print(f"{o['family']} gains, target {o['i_total']} bits, {report.n_trials} trials")
    print(f"  bounds      [{report.lower:.4f}, {report.upper:.4f}]")
    print(f"  mean cost   {report.empirical_mean_cost:.4f} +/- {report.standard_error:.4f} (se)")
    print(f"  overshoot   {report.mean_overshoot:.4f} mean")
    print(f"  within      {report.within_bounds}")
    if spec.support_bound is not None:
        n_delta = stopping.high_prob_steps(o["i_total"], spec.mean_tail, spec.support_bound, o["delta"])
        print(f"  steps for completion w.p. {1 - o['delta']:.2%}: {n_delta}")
    print(f"wrote {o['out']}")
    return 0


def run_slope(o: dict) -> int:
    report = slope.run_noise_sweep(
        noise_levels=o["noise"],
        trials_per_level=o["trials"],
        master_seed=o["seed"],
        resolution=o["resolution"],
        step_cap=o["step_cap"],
        workers=o["workers"],
    )
    write_csv(
        o["out"],
        ["sigma", "trial", "steps_actual", "completed", "final_error"],
        [[t.sigma, t.trial, t.steps_actual, t.completed, t.final_error] for t in report.trials],
    )
    summary = _summary_path(o["out"])
    write_csv(
        summary,
        ["sigma", "steps_predicted", "steps_actual_mean", "steps_actual_se", "gap"],
        [[l.sigma, l.steps_predicted, l.steps_actual_mean, l.steps_actual_se, l.gap]
         for l in report.levels],
    )
    print(f"{'sigma':>8} {'predicted':>10} {'actual':>10} {'se':>8} {'gap':>8}")
    for l in report.levels:
        print(f"{l.sigma:>8.2f} {l.steps_predicted:>10d} {l.steps_actual_mean:>10.2f} "
              f"{l.steps_actual_se:>8.2f} {l.gap:>8.2f}")
    print(f"wrote {o['out']} and {summary}")
    return 0


def run_coloring(o: dict) -> int:
    explicit = [o["n"], o["p"], o["k"], o["instances"]]
    if any(v is not None for v in explicit):
        if any(v is None for v in explicit):
            raise ValueError("--n, --p, --k and --instances must be given together")
        configs = ((o["n"], o["p"], o["k"], o["instances"]),)
    else:
        configs = coloring.DEFAULT_CONFIGS
    report = coloring.run_campaign(configs, master_seed=o["seed"], workers=o["workers"])
    write_csv(
        o["out"],
        ["instance_id", "n", "p", "seed", "agent", "expansions", "c_eff", "found"],
        [[r.instance_id, r.n, r.p, r.seed, r.agent, r.expansions, r.c_eff, r.found]
         for r in report.records],
    )
    summary = _summary_path(o["out"])
    write_csv(
        summary,
        ["n", "p", "random_mean", "greedy_mean", "acp_mean", "acp_prediction", "bound_violations"],
        [[s.n, s.p, s.random_mean, s.greedy_mean, s.acp_mean, s.acp_prediction, s.bound_violations]
         for s in report.summaries],
    )
    print(f"{'(n,p)':>12} {'random':>8} {'greedy':>8} {'acp':>8} {'prediction':>11} "
          f"{'violations':>11} {'discarded':>10}")
    for s in report.summaries:
        print(f"({s.n:>3},{s.p:.2f}) {s.random_mean:>8.2f} {s.greedy_mean:>8.2f} "
              f"{s.acp_mean:>8.2f} {s.acp_prediction:>11.2f} {s.bound_violations:>11d} "
              f"{s.discarded:>10d}")
    print(f"wrote {o['out']} and {summary}")
    return 0


def run_estimate(o: dict) -> int:
    task = gp.EstimationTask(
        noise_variance=o["noise"] ** 2,
        kernel=gp.RBFKernel(lengthscale=o["lengthscale"], signal_variance=o["signal_var"]),
        resolution=o["resolution"],
        theta_grid_size=o["grid"],
        n_outcome_samples=o["trials"],
    )
    report = gp.a_priori_estimate(task, budget=o["budget"], seed=o["seed"])
    write_csv(
        o["out"],
        ["i_total_bits", "i_s_bits", "c_eff", "predicted_steps", "mc_error_bits", "margin", "solvable"],
        [[report.total_bits, report.step_bits, report.cost_predicted, report.predicted_steps,
          report.mc_error_bits, report.cost_margin, report.solvable]],
    )
    print(f"total information   {report.total_bits:.4f} bits")
    print(f"per-step estimate   {report.step_bits:.4f} bits")
    print(f"predicted cost      {report.cost_predicted:.4f} (+ margin {report.cost_margin:.4f})")
    print(f"predicted steps     {report.predicted_steps}")
    print(f"solvable at budget {o['budget']}: {report.solvable}")
    print(f"wrote {o['out']}")
    return 0


def run_approx(o: dict) -> int:
    spec = approx.default_knapsack(o["items"], o["seed"])
    reports = approx.information_vs_epsilon(spec.to_instance(), o["eps"])
    write_csv(
        o["out"],
        ["epsilon", "goal_count", "p_goal", "i_total_indicator_bits", "i_total_search_bits"],
        [[r.epsilon, r.goal_count, r.p_goal, r.i_total_indicator, r.i_total_search]
         for r in reports],
    )
    print(f"{o['items']}-item knapsack, capacity {spec.capacity}")
    print(f"{'epsilon':>8} {'goals':>8} {'p_goal':>10} {'search bits':>12}")
    for r in reports:
        print(f"{r.epsilon:>8.3f} {r.goal_count:>8d} {r.p_goal:>10.6f} {r.i_total_search:>12.4f}")
    print(f"wrote {o['out']}")
    return 0


_RUNNERS = {
    "bounds": run_bounds,
    "slope": run_slope,
    "coloring": run_coloring,
    "estimate": run_estimate,
    "approx": run_approx,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        options = resolve_options(args)
    except OSError as exc:
        print(f"{PROG}: config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"{PROG}: config error: {exc}", file=sys.stderr)
        return 2
    try:
        return _RUNNERS[args.command](options)
    except ValueError as exc:
        print(f"{PROG}: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"{PROG}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - map any runtime failure to exit 1
        print(f"{PROG}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
