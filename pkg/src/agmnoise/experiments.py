"""Registered experiments, threshold search, and plot-script emission.

Each experiment reproduces one figure or demo at desk scale: problems of a
few hundred variables and iteration counts capped at 50 000.  Every cell of
a parameter grid writes one CSV per seed with the common trace schema, an
``index.csv`` lists all files, and re-running with an identical
configuration and seeds produces byte-identical output.  Desk-scale
defaults live in each experiment's ``defaults`` dict and can be overridden
from the CLI or a config file.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from . import baselines, bounds, stm, stm2, testbed
from .core import Problem, STATUS_DIVERGED, Trace, evaluate
from .oracles import (
    Absolute,
    ConstantBias,
    Exact,
    MeasuredRelative,
    Relative,
    RngStream,
    Stochastic,
)


@dataclass
class ExperimentConfig:
    """A single batch invocation: experiment name, seeds, iteration budget,
    output directory, bound-overlay switch, and named parameter overrides."""

    experiment: str
    seeds: Sequence[int] = (0,)
    iters: Optional[int] = None
    out: Path = Path("results")
    overlay: bool = False
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("at least one seed is required")
        self.out = Path(self.out)


@dataclass
class ExperimentResult:
    csv_paths: List[Path]
    plot_script: Optional[Path]
    n_runs: int
    n_diverged: int


ITER_CAP = 50_000


def _iters(cfg: ExperimentConfig, default: int) -> int:
    n = cfg.iters if cfg.iters is not None else default
    return min(int(n), ITER_CAP)


def _param(cfg: ExperimentConfig, key: str, default):
    return cfg.params.get(key, default)


def _attach_bound(trace: Trace, fn: Callable[[int, Optional[float]], Optional[float]]):
    for i, k in enumerate(trace.k):
        trace.bound[i] = fn(k, trace.r_tilde[i])


def _write_index(out_dir: Path, rows: List[dict]) -> Path:
    path = out_dir / "index.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["file", "cell", "seed", "status", "rows", "final_gap"])
        for r in rows:
            w.writerow([r["file"], r["cell"], r["seed"], r["status"],
                        r["rows"], "" if r["final_gap"] is None else repr(r["final_gap"])])
    return path


class _Collector:
    """Accumulates per-run CSVs plus the index for one experiment."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        out_dir.mkdir(parents=True, exist_ok=True)
        self.paths: List[Path] = []
        self.rows: List[dict] = []
        self.n_runs = 0
        self.n_diverged = 0

    def add(self, name: str, cell: str, seed, trace: Trace) -> Path:
        path = trace.write_csv(self.out_dir / name)
        self.paths.append(path)
        self.n_runs += 1
        if trace.status == STATUS_DIVERGED:
            self.n_diverged += 1
        self.rows.append(dict(file=name, cell=cell, seed=seed, status=trace.status,
                              rows=len(trace), final_gap=trace.final_gap))
        return path

    def add_table(self, name: str, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
        path = self.out_dir / name
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow([c if isinstance(c, (int, str)) else repr(float(c))
                            for c in row])
        self.paths.append(path)
        return path

    def finish(self, plot: Optional[Path] = None) -> ExperimentResult:
        self.paths.append(_write_index(self.out_dir, self.rows))
        return ExperimentResult(self.paths, plot, self.n_runs, self.n_diverged)


# ---------------------------------------------------------------------------
# Plot scripts
# ---------------------------------------------------------------------------

_PLOT_DEFAULTS = {
    "title": "objective gap vs iteration",
    "xlabel": "iteration",
    "ylabel": "f(x_k) - f*",
    "terminal": "pngcairo size 960,640",
    "output": "plot.png",
}


def emit_plot_script(csv_paths: Sequence[Path], style: Optional[dict] = None,
                     out_path: Optional[Path] = None) -> Path:
    """Write a gnuplot script drawing gap-vs-iteration on a log scale for
    every CSV, with the bound column (when present) overlaid dashed.

    ``style`` may override ``title``, ``xlabel``, ``ylabel``, ``terminal``
    and ``output``; an empty style uses those documented defaults.
    """
    paths = [Path(p) for p in csv_paths]
    if not paths:
        raise ValueError("no CSV files to plot")
    for p in paths:
        if not p.exists():
            raise FileNotFoundError(p)
    st = dict(_PLOT_DEFAULTS)
    if style:
        st.update(style)
    if out_path is None:
        out_path = paths[0].parent / "plot.gp"
    out_path = Path(out_path)

    lines = [
        "# gnuplot script generated by agmnoise",
        "set datafile separator ','",
        'set datafile missing ""',
        "set logscale y",
        f"set title '{st['title']}'",
        f"set xlabel '{st['xlabel']}'",
        f"set ylabel '{st['ylabel']}'",
        "set key outside",
        f"set terminal {st['terminal']}",
        f"set output '{st['output']}'",
    ]
    plot_parts = []
    for p in paths:
        label = p.stem.replace("_", " ")
        rel = p.name if p.parent == out_path.parent else str(p)
        plot_parts.append(f"'{rel}' skip 1 using 1:2 with lines lw 2 title '{label}'")
        if _csv_has_bound(p):
            plot_parts.append(
                f"'{rel}' skip 1 using 1:8 with lines dashtype 2 lw 1 "
                f"title '{label} bound'")
    lines.append("plot \\")
    lines.append(", \\\n".join("  " + part for part in plot_parts))
    out_path.write_text("\n".join(lines) + "\n")
    return out_path


def _csv_has_bound(path: Path) -> bool:
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or "bound" not in header:
            return False
        col = header.index("bound")
        for row in reader:
            if len(row) > col and row[col] != "":
                return True
    return False


# ---------------------------------------------------------------------------
# Threshold search
# ---------------------------------------------------------------------------


def _solver_runner(problem: Problem, solver: str, budget_iters: int):
    # Threshold probes use the measured-relative noise convention: it is the
    # realization that can actually destabilize the methods inside alpha < 1
    # (the certified true-relative oracle keeps every reading descent-
    # correlated, so no divergence threshold exists below the model cap).
    if solver == "stm":
        params = stm.params_for(problem, max_iters=budget_iters)

        def go(alpha, seed):
            return stm.run(problem, MeasuredRelative(alpha), params,
                           np.zeros(problem.dim), RngStream(seed))
        return go
    if solver == "stm2":
        def go(alpha, seed):
            return stm2.run2(problem, MeasuredRelative(alpha), np.zeros(problem.dim),
                             budget_iters, RngStream(seed))
        return go
    if solver == "tmm":
        def go(alpha, seed):
            return baselines.tmm_run(problem, MeasuredRelative(alpha),
                                     np.zeros(problem.dim), budget_iters,
                                     RngStream(seed))
        return go
    raise ValueError(f"unknown solver {solver!r}")


def _diverges(trace: Trace) -> bool:
    if trace.status == STATUS_DIVERGED:
        return True
    first = trace.f_gap[0] if trace.f_gap else None
    mg = trace.min_gap
    if first is None or mg is None:
        raise ValueError("threshold search needs a problem with a known optimum")
    return mg >= first


def alpha_star_bracket(problem: Problem, solver, alpha_lo: float, alpha_hi: float,
                       budget_iters: int, seeds: Sequence[int],
                       rounds: int = 12):
    """Bisect for the relative-noise divergence threshold.

    A noise level counts as divergent when a majority of seeds either hit
    the divergence status or never improve on the initial gap within the
    budget.  Returns the final (convergent, divergent) bracket.
    """
    if not alpha_lo < alpha_hi:
        raise ValueError("need alpha_lo < alpha_hi")
    runner = solver if callable(solver) else _solver_runner(problem, solver, budget_iters)

    def diverges(alpha: float) -> bool:
        votes = sum(1 for s in seeds if _diverges(runner(alpha, s)))
        return votes * 2 > len(seeds)

    lo_div = diverges(alpha_lo)
    hi_div = diverges(alpha_hi)
    if lo_div == hi_div:
        word = "divergent" if lo_div else "convergent"
        raise ValueError(f"both endpoints classify as {word}; no threshold in range")
    lo, hi = alpha_lo, alpha_hi
    for _ in range(rounds):
        mid = 0.5 * (lo + hi)
        if diverges(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def alpha_star_search(problem: Problem, solver, alpha_lo: float, alpha_hi: float,
                      budget_iters: int, seeds: Sequence[int],
                      rounds: int = 12) -> float:
    """Midpoint of the final bisection bracket from :func:`alpha_star_bracket`."""
    lo, hi = alpha_star_bracket(problem, solver, alpha_lo, alpha_hi,
                                budget_iters, seeds, rounds)
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Shared experiment pieces
# ---------------------------------------------------------------------------


def _convex_testbed(cfg: ExperimentConfig) -> Problem:
    return testbed.worst_case_convex(
        L_f=_param(cfg, "lf", 1.0),
        k=int(_param(cfg, "k", 50)),
        n=int(_param(cfg, "n", 100)),
    )


def _sc_testbed(cfg: ExperimentConfig, chi_default: float = 100.0) -> Problem:
    return testbed.worst_case_strongly_convex(
        mu=_param(cfg, "mu", 0.1),
        chi=_param(cfg, "chi", chi_default),
        n=int(_param(cfg, "n", 100)),
    )


def _grid(value) -> List[float]:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return [float(v) for v in str(value).split(",") if v != ""]


def _convex_overlay(problem: Problem, delta: float):
    R = float(np.linalg.norm(problem.known_argmin))
    bi = bounds.BoundInputs(L_f=problem.lips, mu=0.0, R=R, delta=delta)

    def fn(k, r_tilde):
        if k < 1 or r_tilde is None:
            return None
        return bounds.rate_bound_convex(bi, k, r_tilde)
    return fn


def _sc_overlay(problem: Problem, delta: float, tau: int):
    R = float(np.linalg.norm(problem.known_argmin))
    bi = bounds.BoundInputs(L_f=problem.lips, mu=problem.mu, R=R, delta=delta)

    def fn(k, r_tilde):
        if tau == 1:
            if r_tilde is None:
                return None
            return bounds.rate_bound_strongly_convex(1, replace(bi, r_tilde_N=r_tilde), N=k)
        return bounds.rate_bound_strongly_convex(2, bi, N=k)
    return fn


def _noise_grid(cfg: ExperimentConfig, problem: Problem, cells, iters: int,
                tau: Optional[int], overlay_fn) -> ExperimentResult:
    """Run STM over (cell label, oracle, delta) triples for every seed."""
    col = _Collector(cfg.out / cfg.experiment)
    params = stm.params_for(problem, tau=tau, max_iters=iters)
    x0 = np.zeros(problem.dim)
    for label, oracle, delta in cells:
        for seed in cfg.seeds:
            trace = stm.run(problem, oracle, params, x0, RngStream(seed))
            if cfg.overlay and overlay_fn is not None:
                fn = overlay_fn(problem, delta)
                if fn is not None:
                    _attach_bound(trace, fn)
            col.add(f"{cfg.experiment}_{label}_seed{seed}.csv", label, seed, trace)
    plot = emit_plot_script(
        [p for p in col.paths if p.suffix == ".csv"],
        {"title": cfg.experiment},
        col.out_dir / "plot.gp",
    )
    return col.finish(plot)


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


def _exp_convex_absolute(cfg: ExperimentConfig, default_iters: int) -> ExperimentResult:
    problem = _convex_testbed(cfg)
    deltas = _grid(_param(cfg, "deltas", (0.0, 1e-3, 1e-2, 1e-1)))
    cells = [(f"delta{d:g}", Exact() if d == 0 else Absolute(d), d) for d in deltas]
    return _noise_grid(cfg, problem, cells, _iters(cfg, default_iters), 1,
                       lambda p, d: _convex_overlay(p, d))


def _exp_fig3(cfg):
    return _exp_convex_absolute(cfg, 50_000)


def _exp_fig4(cfg):
    return _exp_convex_absolute(cfg, 10_000)


def _exp_fig5(cfg):
    problem = _convex_testbed(cfg)
    delta = _param(cfg, "delta", 0.01)
    alpha = _param(cfg, "alpha", 0.01)
    cells = [
        ("exact", Exact(), 0.0),
        (f"abs{delta:g}", Absolute(delta), delta),
        (f"rel{alpha:g}", Relative(alpha), 0.0),
    ]
    return _noise_grid(cfg, problem, cells, _iters(cfg, 10_000), 1,
                       lambda p, d: _convex_overlay(p, d) if d > 0 else None)


def _rel_oracle(cfg: ExperimentConfig, alpha: float):
    """Relative-noise oracle for threshold-study grids.

    Defaults to the measured-relative convention (error proportional to the
    returned reading), which is the realization that actually exhibits a
    divergence threshold inside alpha < 1; ``convention=certified`` switches
    to the bound-certified oracle.
    """
    if alpha == 0.0:
        return Exact()
    if str(_param(cfg, "convention", "measured")) == "certified":
        return Relative(alpha)
    return MeasuredRelative(alpha)


def _exp_fig6(cfg):
    problem = _convex_testbed(cfg)
    alphas = _grid(_param(cfg, "alphas", (0.0, 0.1, 0.3, 0.5, 0.6, 0.71, 0.8, 0.9)))
    cells = [(f"alpha{a:g}", _rel_oracle(cfg, a), 0.0) for a in alphas]
    return _noise_grid(cfg, problem, cells, _iters(cfg, 10_000), 1, None)


def _exp_fig7(cfg):
    problem = _sc_testbed(cfg)
    deltas = _grid(_param(cfg, "deltas", (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)))
    cells = [(f"delta{d:g}", Absolute(d), d) for d in deltas]
    return _noise_grid(cfg, problem, cells, _iters(cfg, 5_000), 2,
                       lambda p, d: _sc_overlay(p, d, tau=2))


def _exp_fig8(cfg):
    """Noise-budget sweep: for each target accuracy, run with the computed
    tolerable noise and sufficient step count, and report the seed-mean gap."""
    problem = _sc_testbed(cfg)
    eps_grid = _grid(_param(cfg, "eps_grid", (0.5, 0.2, 0.1, 0.05)))
    seeds = cfg.seeds if len(cfg.seeds) > 1 else range(int(_param(cfg, "n_seeds", 30)))
    x0 = np.zeros(problem.dim)
    R = float(np.linalg.norm(x0 - problem.known_argmin))
    col = _Collector(cfg.out / cfg.experiment)
    summary = []
    for eps in eps_grid:
        delta, n_min = bounds.noise_budget_strongly_convex(eps, problem.mu, problem.lips, R)
        n_min = min(n_min, ITER_CAP)
        params = stm.params_for(problem, tau=2, max_iters=n_min)
        finals = []
        for seed in seeds:
            trace = stm.run(problem, Absolute(delta), params, x0, RngStream(seed))
            if cfg.overlay:
                _attach_bound(trace, _sc_overlay(problem, delta, tau=2))
            col.add(f"{cfg.experiment}_eps{eps:g}_seed{seed}.csv",
                    f"eps{eps:g}", seed, trace)
            finals.append(trace.final_gap)
        mean_gap = float(np.mean(finals))
        summary.append((eps, delta, n_min, mean_gap, int(mean_gap <= eps)))
    col.add_table(f"{cfg.experiment}_summary.csv",
                  ("eps", "delta_max", "n_min", "mean_final_gap", "target_met"),
                  summary)
    return col.finish()


def _exp_relative_sc(cfg: ExperimentConfig, chi_default: float) -> ExperimentResult:
    problem = _sc_testbed(cfg, chi_default)
    alphas = _grid(_param(cfg, "alphas", (0.0, 0.001, 0.01, 0.05, 0.1, 0.3, 0.5)))
    cells = [(f"alpha{a:g}", _rel_oracle(cfg, a), 0.0) for a in alphas]
    return _noise_grid(cfg, problem, cells, _iters(cfg, 3_000), 2, None)


def _exp_fig9(cfg):
    return _exp_relative_sc(cfg, 100.0)


def _exp_fig10(cfg):
    return _exp_relative_sc(cfg, 20.0)


def _threshold_vs_l(cfg: ExperimentConfig, solver: str) -> ExperimentResult:
    """Empirical divergence thresholds across smoothness constants at fixed
    strong convexity."""
    mu = _param(cfg, "mu", 0.1)
    n = int(_param(cfg, "n", 100))
    lfs = _grid(_param(cfg, "lfs", (1.0, 2.0, 5.0, 10.0)))
    budget = _iters(cfg, 2_000)
    lo = _param(cfg, "lo", 0.01)
    hi = _param(cfg, "hi", 0.99)
    col = _Collector(cfg.out / cfg.experiment)
    rows = []
    for lf in lfs:
        chi = lf / mu
        problem = testbed.worst_case_strongly_convex(mu, chi, n)
        blo, bhi = alpha_star_bracket(problem, solver, lo, hi, budget, cfg.seeds)
        rows.append((lf, chi, blo, bhi, 0.5 * (blo + bhi),
                     baselines.tmm_alpha_threshold(chi)))
    col.add_table(f"{cfg.experiment}_thresholds.csv",
                  ("L_f", "chi", "bracket_lo", "bracket_hi", "alpha_star",
                   "tmm_analytic_threshold"),
                  rows)
    return col.finish()


def _exp_fig11(cfg):
    return _threshold_vs_l(cfg, "stm")


def _exp_fig12(cfg):
    return _threshold_vs_l(cfg, "tmm")


def _exp_gd_drift(cfg):
    """Constant gradient bias pushes plain descent to a displaced fixed
    point at distance bias/mu from the minimizer."""
    lam = _grid(_param(cfg, "lambdas", (0.01, 1.0)))
    delta = _param(cfg, "bias", 1e-3)
    problem = testbed.diagonal_quadratic(lam)
    bias = np.zeros(problem.dim)
    bias[0] = delta
    iters = _iters(cfg, 5_000)
    col = _Collector(cfg.out / cfg.experiment)
    for seed in cfg.seeds:
        trace = baselines.gd_run(problem, ConstantBias(bias), 1.0 / problem.lips,
                                 np.zeros(problem.dim), iters, RngStream(seed))
        col.add(f"{cfg.experiment}_seed{seed}.csv", "drift", seed, trace)
        x1 = float(trace.x_final[0])
        limit = delta / problem.mu
        col.add_table(f"{cfg.experiment}_summary_seed{seed}.csv",
                      ("bias", "mu", "final_x1", "limit_bias_over_mu", "rel_err"),
                      [(delta, problem.mu, x1, limit, abs(x1 - limit) / limit)])
    return col.finish()


def _exp_stopping(cfg):
    """Certified stopping rules on the convex worst case with the noise
    level small enough for the accuracy budget."""
    problem = _convex_testbed(cfg)
    x0 = np.zeros(problem.dim)
    R = float(np.linalg.norm(x0 - problem.known_argmin))
    L = 2.0 * problem.lips
    eps = _param(cfg, "eps", 1e-2 * L * R * R)
    nmax = stm.n_max(L, R, eps)
    delta = min(math.sqrt(eps * L / (3.0 * (nmax + 1))), eps / (9.0 * R))
    delta = _param(cfg, "delta", delta)
    fstar = problem.known_min
    col = _Collector(cfg.out / cfg.experiment)
    rows = []
    for rule_name, rule in (("known_fstar", stm.KnownFstar(eps, R, fstar)),
                            ("adaptive", stm.Adaptive(eps, R, fstar))):
        params = stm.params_for(problem, tau=1, max_iters=2 * nmax, stop=rule)
        for seed in cfg.seeds:
            trace = stm.run(problem, Absolute(delta) if delta > 0 else Exact(),
                            params, x0, RngStream(seed))
            col.add(f"{cfg.experiment}_{rule_name}_seed{seed}.csv",
                    rule_name, seed, trace)
            stop_iter = trace.k[-1] if trace.status == "stopped" else -1
            delta2 = delta * delta / L
            cert = delta2 * (nmax + 1) + 3.0 * R * delta + eps
            rows.append((rule_name, seed, stop_iter, nmax,
                         trace.final_gap, cert, int(trace.final_gap <= cert)))
    col.add_table(f"{cfg.experiment}_summary.csv",
                  ("rule", "seed", "stop_iter", "n_max", "final_gap",
                   "certified_bound", "certificate_holds"),
                  rows)
    return col.finish()


def make_logreg_instance(samples: int = 50, features: int = 10,
                         lambda1: float = 0.1, data_seed: int = 12345) -> Problem:
    """Synthetic l1-regularized logistic regression with a planted model."""
    rng = RngStream(data_seed)
    X = rng.normal(samples * features).reshape(samples, features)
    w = rng.normal(features)
    logits = X @ (w / np.linalg.norm(w))
    y = (rng.uniform(samples) < 1.0 / (1.0 + np.exp(-logits))).astype(float)
    return testbed.logreg_l1(X, y, lambda1)


def _exp_composite(cfg):
    """l1-regularized logistic regression under absolute gradient noise;
    gaps are measured against a long exact reference solve."""
    problem = make_logreg_instance(
        samples=int(_param(cfg, "samples", 50)),
        features=int(_param(cfg, "features", 10)),
        lambda1=_param(cfg, "lambda1", 0.1),
        data_seed=int(_param(cfg, "data_seed", 12345)),
    )
    x0 = np.zeros(problem.dim)
    ref_iters = int(_param(cfg, "ref_iters", 20_000))
    ref_params = stm.params_for(problem, tau=1, max_iters=ref_iters)
    ref = stm.run(problem, Exact(), ref_params, x0, RngStream(0))
    fstar = min(f for f in ref.f)
    xstar = ref.x_final
    problem = replace(problem, known_min=fstar, known_argmin=xstar)
    deltas = _grid(_param(cfg, "deltas", (0.0, 0.01)))
    cells = [(f"delta{d:g}", Exact() if d == 0 else Absolute(d), d) for d in deltas]
    return _noise_grid(cfg, problem, cells, _iters(cfg, 3_000), 1,
                       lambda p, d: _convex_overlay(p, d))


def make_finite_sum_instance(components: int = 10, dim: int = 5,
                             spread: float = 1.0, data_seed: int = 777) -> Problem:
    """Finite sum of shifted quadratics with a known average minimizer."""
    rng = RngStream(data_seed)
    centers = rng.normal(components * dim).reshape(components, dim) * spread
    comps = []
    for i in range(components):
        c = centers[i]
        comps.append(Problem(
            dim=dim,
            value=(lambda x, c=c: 0.5 * float(np.dot(x - c, x - c))),
            grad=(lambda x, c=c: x - c),
            lips=1.0,
            mu=1.0,
        ))
    avg = testbed.finite_sum(comps)
    cbar = centers.mean(axis=0)
    return replace(avg, known_argmin=cbar, known_min=float(avg.value(cbar)))


def _exp_stochastic(cfg):
    """Mini-batch variance scaling plus the seed-mean trajectory of the
    stochastic method against its expectation bound."""
    from .oracles import minibatch_variance_estimate

    col = _Collector(cfg.out / cfg.experiment)
    fsum = make_finite_sum_instance(
        components=int(_param(cfg, "components", 10)),
        dim=int(_param(cfg, "dim", 5)),
    )
    x = np.ones(fsum.dim)
    trials = int(_param(cfg, "trials", 10_000))
    batches = [int(b) for b in _grid(_param(cfg, "batches", (1, 2, 4, 8)))]
    var_rows = []
    for m in batches:
        est = minibatch_variance_estimate(fsum, x, m, trials, RngStream(cfg.seeds[0]))
        var_rows.append((m, trials, est))
    col.add_table(f"{cfg.experiment}_variance.csv",
                  ("batch", "trials", "variance_estimate"), var_rows)

    problem = _sc_testbed(cfg, chi_default=10.0)
    delta = _param(cfg, "delta", 0.5)
    iters = _iters(cfg, 500)
    seeds = cfg.seeds if len(cfg.seeds) > 1 else range(int(_param(cfg, "n_seeds", 30)))
    params = stm.params_for(problem, tau=1, max_iters=iters)
    x0 = np.zeros(problem.dim)
    gaps = []
    for seed in seeds:
        trace = stm.run(problem, Stochastic(delta), params, x0, RngStream(seed))
        col.add(f"{cfg.experiment}_seed{seed}.csv", f"delta{delta:g}", seed, trace)
        gaps.append(trace.gaps())
    mean_gap = np.mean(np.stack(gaps), axis=0)
    col.add_table(f"{cfg.experiment}_mean.csv", ("iter", "mean_f_gap"),
                  [(int(k), g) for k, g in enumerate(mean_gap)])
    return col.finish()


def _exp_regularize(cfg):
    """Convex-to-strongly-convex reduction driven by its accuracy budget."""
    problem = testbed.worst_case_convex(
        L_f=_param(cfg, "lf", 1.0),
        k=int(_param(cfg, "k", 25)),
        n=int(_param(cfg, "n", 50)),
    )
    x0 = np.zeros(problem.dim)
    R = float(np.linalg.norm(x0 - problem.known_argmin))
    eps_grid = _grid(_param(cfg, "eps_grid", (0.5, 0.2, 0.1)))
    col = _Collector(cfg.out / cfg.experiment)
    rows = []
    for eps in eps_grid:
        mu, delta, n_min = bounds.noise_budget_regularized(eps, 2.0 * problem.lips, R)
        n_min = min(n_min, ITER_CAP)
        for seed in cfg.seeds:
            trace = stm.solve_regularized(problem, Absolute(delta), eps, R, x0,
                                          RngStream(seed), max_iters=n_min)
            col.add(f"{cfg.experiment}_eps{eps:g}_seed{seed}.csv",
                    f"eps{eps:g}", seed, trace)
            rows.append((eps, mu, delta, n_min, seed, trace.final_gap,
                         int(trace.final_gap <= eps)))
    col.add_table(f"{cfg.experiment}_summary.csv",
                  ("eps", "mu", "delta_max", "n_min", "seed", "final_gap",
                   "target_met"), rows)
    return col.finish()


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    runner: Callable[[ExperimentConfig], ExperimentResult]


EXPERIMENTS: Dict[str, Experiment] = {
    e.name: e
    for e in [
        Experiment("fig3", "convex worst case, absolute noise grid, long horizon", _exp_fig3),
        Experiment("fig4", "convex worst case, absolute noise grid, short horizon", _exp_fig4),
        Experiment("fig5", "convex worst case: absolute vs relative noise", _exp_fig5),
        Experiment("fig6", "convex worst case, relative noise grid (threshold study)", _exp_fig6),
        Experiment("fig7", "strongly convex, absolute noise grid with bound overlay", _exp_fig7),
        Experiment("fig8", "noise budgets vs target accuracy, seed means", _exp_fig8),
        Experiment("fig9", "strongly convex chi=100, relative noise grid", _exp_fig9),
        Experiment("fig10", "strongly convex chi=20, relative noise grid", _exp_fig10),
        Experiment("fig11", "empirical divergence threshold vs smoothness (accelerated)", _exp_fig11),
        Experiment("fig12", "empirical divergence threshold vs smoothness (triple momentum)", _exp_fig12),
        Experiment("gd-drift", "gradient descent under constant bias drifts to bias/mu", _exp_gd_drift),
        Experiment("stopping", "certified stopping rules and their budgets", _exp_stopping),
        Experiment("composite", "l1 logistic regression under gradient noise", _exp_composite),
        Experiment("stochastic", "mini-batch variance scaling and stochastic runs", _exp_stochastic),
        Experiment("regularize", "convex-to-strongly-convex reduction budget", _exp_regularize),
    ]
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run a registered experiment; raises KeyError for unknown names."""
    if cfg.experiment not in EXPERIMENTS:
        known = ", ".join(sorted(EXPERIMENTS))
        raise KeyError(f"unknown experiment {cfg.experiment!r}; known: {known}")
    return EXPERIMENTS[cfg.experiment].runner(cfg)
