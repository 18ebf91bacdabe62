"""Batch-style command line interface.

Three subcommands:

``run <experiment>``
    Run a registered experiment and write per-run CSVs plus an index (and a
    gnuplot script for trajectory grids).  Configuration comes from an
    optional flat JSON file; every field is also settable by a flag, and
    flags win.  Extra experiment parameters go through repeated
    ``--set key=value`` flags.

``threshold``
    Bisection search for the relative-noise divergence threshold of a
    solver on a benchmark problem.

``bounds <name>``
    Evaluate any bound/budget formula from the bounds toolbox and print
    the result.

Exit codes: 0 on success, 2 when every run of an experiment diverged, and
1 on configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds, testbed
from .baselines import tmm_alpha_threshold
from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    alpha_star_bracket,
    run_experiment,
)
from .stm import n_max
from .stm2 import max_alpha_relative

# Bound formulas exposed to `bounds <name>`; each entry maps flag names to
# a flat callable.  tau/N/k are integers, everything else is a float.
_INT_ARGS = {"tau", "N", "k"}


def _rate_convex(L_f, R, delta, N, r_tilde):
    bi = bounds.BoundInputs(L_f=L_f, R=R, delta=delta)
    return bounds.rate_bound_convex(bi, int(N), r_tilde)


def _rate_strongly_convex(tau, L_f, mu, R, delta, N, r_tilde=0.0):
    bi = bounds.BoundInputs(L_f=L_f, mu=mu, R=R, delta=delta,
                            r_tilde_N=r_tilde)
    return bounds.rate_bound_strongly_convex(int(tau), bi, int(N))


def _stm2_rate(L_f, mu, R, alpha, delta0, k):
    bi = bounds.BoundInputs(L_f=L_f, mu=mu, R=R, alpha=alpha, delta0=delta0)
    return bounds.stm2_rate_bound(bi, int(k))


def _stm2_envelope(L_f, mu, alpha, k):
    bi = bounds.BoundInputs(L_f=L_f, mu=mu, alpha=alpha)
    return bounds.stm2_envelope(bi, int(k))


BOUND_FORMULAS = {
    "rate-convex": (_rate_convex, ("L_f", "R", "delta", "N", "r_tilde")),
    "rate-strongly-convex": (_rate_strongly_convex,
                             ("tau", "L_f", "mu", "R", "delta", "N", "r_tilde")),
    "stm2-rate": (_stm2_rate, ("L_f", "mu", "R", "alpha", "delta0", "k")),
    "stm2-envelope": (_stm2_envelope, ("L_f", "mu", "alpha", "k")),
    "tau-crossover": (bounds.tau_crossover_delta, ("mu", "L_f", "r_tilde")),
    "budget-strongly-convex": (bounds.noise_budget_strongly_convex,
                               ("eps", "mu", "L_f", "R")),
    "budget-regularized": (bounds.noise_budget_regularized, ("eps", "L", "R")),
    "budget-linear-system": (bounds.noise_budget_linear_system,
                             ("eps0", "L", "R_star")),
    "n-max": (n_max, ("L", "R", "eps")),
    "tmm-threshold": (tmm_alpha_threshold, ("chi",)),
    "max-alpha-relative": (max_alpha_relative, ("mu", "L_f")),
}


def _parse_set(pairs):
    """Parse repeated key=value flags; values become bool/int/float/list
    where they look like one, otherwise stay strings."""
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ValueError(f"--set expects key=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        out[key.strip()] = _coerce(raw.strip())
    return out


def _coerce(raw: str):
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    if "," in raw:
        return [_coerce(part) for part in raw.split(",") if part != ""]
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            continue
    return raw


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agmnoise",
        description="experiments for accelerated gradient methods under gradient noise",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    exp_list = ", ".join(sorted(EXPERIMENTS))
    p_run = sub.add_parser("run", help="run a registered experiment")
    p_run.add_argument("experiment", help=f"one of: {exp_list}")
    p_run.add_argument("--config", type=Path, help="flat JSON config file")
    p_run.add_argument("--seed", type=int, action="append",
                       help="seed (repeatable)")
    p_run.add_argument("--iters", type=int, help="iteration budget per run")
    p_run.add_argument("--out", type=Path, help="output directory")
    p_run.add_argument("--overlay", action="store_true", default=None,
                       help="emit the theoretical bound column")
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="experiment parameter override (repeatable)")

    p_thr = sub.add_parser("threshold",
                           help="bisect the relative-noise divergence threshold")
    p_thr.add_argument("--solver", choices=("stm", "stm2", "tmm"), required=True)
    p_thr.add_argument("--chi", type=float, default=None,
                       help="condition number; omit for the mu = 0 benchmark")
    p_thr.add_argument("--mu", type=float, default=0.1)
    p_thr.add_argument("--n", type=int, default=100)
    p_thr.add_argument("--lo", type=float, required=True)
    p_thr.add_argument("--hi", type=float, required=True)
    p_thr.add_argument("--budget", type=int, default=None,
                       help="iterations per probe run")
    p_thr.add_argument("--seeds", type=int, default=5, help="number of seeds")

    p_bnd = sub.add_parser("bounds", help="evaluate a bound or budget formula")
    bnd_sub = p_bnd.add_subparsers(dest="formula", required=True)
    for name, (fn, args) in BOUND_FORMULAS.items():
        p = bnd_sub.add_parser(name, help=(fn.__doc__ or "").strip().splitlines()[0]
                               if fn.__doc__ else None)
        for arg in args:
            kind = int if arg in _INT_ARGS else float
            p.add_argument(f"--{arg.replace('_', '-')}", dest=arg, type=kind,
                           required=True)
    return parser


def _cmd_run(args) -> int:
    cfg_dict = {}
    if args.config is not None:
        try:
            cfg_dict = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 1
        if not isinstance(cfg_dict, dict):
            print("error: config must be a flat JSON object", file=sys.stderr)
            return 1
    params = {k: v for k, v in cfg_dict.items()
              if k not in ("experiment", "seeds", "iters", "out", "overlay")}
    try:
        params.update(_parse_set(args.set))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    seeds = args.seed if args.seed else cfg_dict.get("seeds", [0])
    cfg = ExperimentConfig(
        experiment=args.experiment,
        seeds=tuple(int(s) for s in seeds),
        iters=args.iters if args.iters is not None else cfg_dict.get("iters"),
        out=args.out if args.out is not None else Path(cfg_dict.get("out", "results")),
        overlay=args.overlay if args.overlay is not None
        else bool(cfg_dict.get("overlay", False)),
        params=params,
    )
    try:
        result = run_experiment(cfg)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for p in result.csv_paths:
        print(p)
    if result.plot_script is not None:
        print(result.plot_script)
    if result.n_runs > 0 and result.n_diverged == result.n_runs:
        print("all runs diverged", file=sys.stderr)
        return 2
    return 0


def _cmd_threshold(args) -> int:
    if args.chi is not None:
        problem = testbed.worst_case_strongly_convex(args.mu, args.chi, args.n)
        budget = args.budget if args.budget is not None else 2_000
    else:
        problem = testbed.worst_case_convex(1.0, args.n // 2, args.n)
        budget = args.budget if args.budget is not None else 20_000
    try:
        lo, hi = alpha_star_bracket(problem, args.solver, args.lo, args.hi,
                                    budget, list(range(args.seeds)))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"bracket [{lo!r}, {hi!r}]")
    print(f"alpha_star {(0.5 * (lo + hi))!r}")
    return 0


def _cmd_bounds(args) -> int:
    fn, arg_names = BOUND_FORMULAS[args.formula]
    try:
        value = fn(*[getattr(args, a) for a in arg_names])
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if isinstance(value, tuple):
        print(" ".join(repr(v) for v in value))
    else:
        print(repr(value))
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad usage; report config errors as 1
        return 1 if exc.code not in (0, None) else 0
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "threshold":
        return _cmd_threshold(args)
    if args.command == "bounds":
        return _cmd_bounds(args)
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
