"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Exponentially decaying bounds are checked with an additive
double-precision allowance of ``1e-12 * (initial bound + |f*|)``: once the
exact-arithmetic bound decays below the resolution of the gap computation
(about 1e-16 relative), the comparison is dominated by rounding in
evaluating both sides, not by the method.  Every other tolerance is the
one stated with its criterion.
"""

from __future__ import annotations

import math
import time
from dataclasses import replace

import numpy as np
import pytest

import agmnoise as ag
from agmnoise import bounds, stm
from agmnoise.experiments import (
    ExperimentConfig,
    alpha_star_search,
    make_finite_sum_instance,
    make_logreg_instance,
    run_experiment,
)
from agmnoise.stm import init_state, stm_step
from helpers import certificate_matrix, run_certified


def _report(num, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance {num:02d}] {name}: {status} {detail}")
    assert ok, f"criterion {num} ({name}) failed: {detail}"


def _fp_slack(scale):
    return 1e-12 * scale


def test_criterion_01_exact_convex_rate():
    t0 = time.time()
    p = ag.worst_case_convex(1.0, 50, 100)
    x0 = np.zeros(100)
    R = float(np.linalg.norm(x0 - p.known_argmin))
    L = 2 * p.lips
    params = ag.params_for(p, tau=1, max_iters=2000)
    trace = ag.run(p, ag.Exact(), params, x0, ag.RngStream(0))
    gaps = trace.gaps()
    viol = sum(1 for N in range(1, 2001) if gaps[N] > 4 * L * R * R / N ** 2)
    elapsed = time.time() - t0
    _report(1, "exact convex rate 4LR^2/N^2", viol == 0 and elapsed < 5.0,
            f"violations={viol} time={elapsed:.2f}s")


def test_criterion_02_exact_strongly_convex_rates():
    t0 = time.time()
    p = ag.worst_case_strongly_convex(0.1, 100.0, 100)
    x0 = np.zeros(100)
    R = float(np.linalg.norm(x0 - p.known_argmin))
    L = 2 * p.lips
    total_viol = 0
    for tau in (1, 2):
        params = ag.params_for(p, tau=tau, max_iters=3000)
        trace = ag.run(p, ag.Exact(), params, x0, ag.RngStream(0))
        gaps = trace.gaps()
        mt = p.mu if tau == 1 else p.mu / 2
        slack = _fp_slack(L * R * R + abs(p.known_min))
        for N in range(0, 3001):
            bound = L * R * R * math.exp(-0.5 * math.sqrt(mt / L) * N)
            if gaps[N] > bound + slack:
                total_viol += 1
    elapsed = time.time() - t0
    _report(2, "exact strongly convex rates (tau=1,2)",
            total_viol == 0 and elapsed < 5.0,
            f"violations={total_viol} time={elapsed:.2f}s")


def test_criterion_03_noise_floor_tau2():
    t0 = time.time()
    p = ag.worst_case_strongly_convex(0.1, 100.0, 100)
    x0 = np.zeros(100)
    L = 2 * p.lips
    bad = []
    for delta in (0.5, 1.0):
        floor = (1 + math.sqrt(L / (p.mu / 2))) * (
            delta ** 2 / (2 * p.lips) + delta ** 2 / p.mu)
        params = ag.params_for(p, tau=2, max_iters=5000)
        for seed in range(10):
            trace = ag.run(p, ag.Absolute(delta), params, x0, ag.RngStream(seed))
            if trace.final_gap > floor:
                bad.append((delta, seed, trace.final_gap, floor))
    elapsed = time.time() - t0
    _report(3, "absolute-noise floor at N=5000 (tau=2, 10 seeds)",
            not bad and elapsed < 20.0, f"violations={bad} time={elapsed:.1f}s")


def test_criterion_04_trajectory_boundedness():
    t0 = time.time()
    cvx = pytest.importorskip("cvxpy")
    rng = np.random.default_rng(1)
    A = rng.normal(size=(12, 12)) + 4 * np.eye(12)
    logreg = make_logreg_instance(30, 8, 0.1)
    w = cvx.Variable(8)
    z = logreg_X = None
    # rebuild the data to hand it to the reference solver
    data_rng = ag.RngStream(12345)
    X = data_rng.normal(30 * 8).reshape(30, 8)
    wt = data_rng.normal(8)
    logits = X @ (wt / np.linalg.norm(wt))
    y = (data_rng.uniform(30) < 1.0 / (1.0 + np.exp(-logits))).astype(float)
    objective = cvx.Minimize(cvx.sum(cvx.logistic(X @ w) - cvx.multiply(y, X @ w))
                             + 0.1 * cvx.norm1(w))
    cvx.Problem(objective).solve()
    logreg_ref = replace(logreg, known_argmin=np.asarray(w.value).ravel(),
                         known_min=None)

    fsum = make_finite_sum_instance(6, 5)
    cases = [
        ("worst-convex", ag.worst_case_convex(1.0, 20, 40), np.zeros(40), 1e-6),
        ("worst-strong", ag.worst_case_strongly_convex(0.1, 50.0, 40),
         np.zeros(40), 1e-6),
        ("diagonal", ag.diagonal_quadratic(np.linspace(0.05, 1.0, 10)),
         np.ones(10), 1e-6),
        ("linear-system", ag.linear_system(A, rng.normal(size=12)),
         np.zeros(12), 1e-6),
        ("finite-sum", fsum, np.zeros(5), 1e-6),
        # the composite reference minimizer is itself 1e-8-accurate, so the
        # radius comparison gets a correspondingly looser allowance
        ("logreg-l1", logreg_ref, np.zeros(8), 1e-4),
    ]
    bad = []
    for name, problem, x0, slack in cases:
        params = ag.params_for(problem, max_iters=200)
        trace = ag.run(problem, ag.Exact(), params, x0, ag.RngStream(0))
        R = float(np.linalg.norm(x0 - problem.known_argmin))
        if max(trace.r_tilde) > R * (1 + slack):
            bad.append((name, max(trace.r_tilde), R))
    elapsed = time.time() - t0
    _report(4, "exact-oracle trajectory radius <= R on all testbed problems",
            not bad and elapsed < 10.0, f"violations={bad} time={elapsed:.1f}s")


def test_criterion_05_per_iteration_certificates():
    worst = {}
    for label, problem, oracle, tau, iters in certificate_matrix():
        params = ag.params_for(problem, tau=tau, max_iters=iters)
        res = run_certified(problem, oracle, params, np.zeros(problem.dim),
                            seed=0, iters=iters, tol=1e-9)
        worst[label] = max(res.values())
    _report(5, "per-iteration certificates at 1e-9",
            all(v <= 1e-9 for v in worst.values()),
            f"worst residual={max(worst.values()):.2e}")


def test_criterion_06_stopping_rule():
    t0 = time.time()
    p = ag.worst_case_convex(1.0, 50, 100)
    x0 = np.zeros(100)
    R = float(np.linalg.norm(x0 - p.known_argmin))
    L = 2 * p.lips
    eps = 1e-2 * L * R * R
    nmax = ag.n_max(L, R, eps)
    delta = min(math.sqrt(eps * L / (3 * (nmax + 1))), eps / (9 * R))
    delta2 = delta * delta / L
    cert = delta2 * (nmax + 1) + 3 * R * delta + eps
    rule = ag.KnownFstar(eps=eps, R=R, fstar=p.known_min)
    params = ag.params_for(p, tau=1, max_iters=3 * nmax, stop=rule)
    bad = []
    for seed in range(10):
        trace = ag.run(p, ag.Absolute(delta), params, x0, ag.RngStream(seed))
        fired = trace.status == "stopped"
        if not (fired and trace.k[-1] <= nmax and trace.final_gap <= cert):
            bad.append((seed, trace.status, trace.k[-1], trace.final_gap))
    elapsed = time.time() - t0
    _report(6, "certified stop rule fires within budget (10 seeds)",
            not bad and elapsed < 30.0,
            f"n_max={nmax} delta={delta:.4f} violations={bad} time={elapsed:.1f}s")


def test_criterion_07_gd_drift():
    t0 = time.time()
    mu, L_f, delta = 0.01, 1.0, 1e-3
    p = ag.diagonal_quadratic([mu, L_f])
    trace = ag.gd_run(p, ag.ConstantBias(np.array([delta, 0.0])), 1.0 / L_f,
                      np.zeros(2), 5000, ag.RngStream(0))
    x1 = float(trace.x_final[0])
    closed = (delta / L_f) * (1 - (1 - mu / L_f) ** 5000) / (mu / L_f)
    ok = (abs(x1 - delta / mu) / (delta / mu) <= 0.005
          and abs(x1 - closed) <= 1e-10)
    elapsed = time.time() - t0
    _report(7, "gradient-descent drift to bias/mu", ok and elapsed < 1.0,
            f"x1={x1:.6f} closed={closed:.6f} time={elapsed:.2f}s")


def test_criterion_08_stm2_relative_rate():
    t0 = time.time()
    p = ag.worst_case_strongly_convex(0.1, 20.0, 100)
    alpha = ag.max_alpha_relative(p.mu, p.lips)
    x0 = np.zeros(100)
    R = float(np.linalg.norm(x0 - p.known_argmin))
    d0 = ag.evaluate(p, x0) - p.known_min
    bi = bounds.BoundInputs(L_f=p.lips, mu=p.mu, R=R, alpha=alpha, delta0=d0)
    slack = _fp_slack(bounds.stm2_rate_bound(bi, 0) + abs(p.known_min))
    viol = 0
    for seed in range(10):
        trace = ag.run2(p, ag.Relative(alpha), x0, 3000, ag.RngStream(seed))
        gaps = trace.gaps()
        for k in range(len(gaps)):
            if gaps[k] > bounds.stm2_rate_bound(bi, k) + slack:
                viol += 1
    elapsed = time.time() - t0
    _report(8, "relative-noise momentum rate (10 seeds, k<=3000)",
            viol == 0 and elapsed < 10.0,
            f"alpha={alpha:.5f} violations={viol} time={elapsed:.1f}s")


def test_criterion_09_threshold_ordering():
    t0 = time.time()
    ordering_ok = True
    details = []
    for chi in (10.0, 100.0):
        p = ag.worst_case_strongly_convex(0.1, chi, 50)
        a_star = alpha_star_search(p, "stm", 0.02, 0.98, 2500, range(5))
        thr = ag.tmm_alpha_threshold(chi)
        details.append(f"chi={chi:g}: stm={a_star:.3f} tmm={thr:.4f}")
        ordering_ok = ordering_ok and a_star > thr
    p0 = ag.worst_case_convex(1.0, 50, 100)
    a_convex = alpha_star_search(p0, "stm", 0.05, 0.98, 20_000, range(5))
    details.append(f"mu=0: {a_convex:.3f}")
    window_ok = 0.5 <= a_convex <= 0.9
    elapsed = time.time() - t0
    _report(9, "divergence-threshold ordering and window",
            ordering_ok and window_ok and elapsed < 300.0,
            "; ".join(details) + f" time={elapsed:.0f}s")


def test_criterion_10_stochastic_extension():
    t0 = time.time()
    fsum = make_finite_sum_instance(10, 5)
    x = np.ones(5)
    e1 = ag.minibatch_variance_estimate(fsum, x, 1, 10_000, ag.RngStream(1))
    e4 = ag.minibatch_variance_estimate(fsum, x, 4, 10_000, ag.RngStream(2))
    ratio_ok = abs(e1 / e4 - 4.0) <= 1.0

    p = ag.worst_case_strongly_convex(0.1, 10.0, 30)
    x0 = np.zeros(30)
    R = float(np.linalg.norm(x0 - p.known_argmin))
    delta, N, n_seeds = 0.5, 300, 30
    params = ag.params_for(p, tau=1, max_iters=N)
    oracle = ag.Stochastic(delta)
    gap_sum = 0.0
    dists = np.zeros((3, N + 1))  # per family, summed over seeds
    for seed in range(n_seeds):
        rng = ag.RngStream(seed)
        st = init_state(p, params, x0, oracle, rng)
        xs = p.known_argmin
        dists[0, 0] += np.linalg.norm(st.z - xs)
        dists[1, 0] += np.linalg.norm(st.x - xs)
        dists[2, 0] += np.linalg.norm(st.x_tilde0 - xs)
        for k in range(1, N + 1):
            st = stm_step(st, params, p, oracle, rng)
            dists[0, k] += np.linalg.norm(st.z - xs)
            dists[1, k] += np.linalg.norm(st.x - xs)
            dists[2, k] += np.linalg.norm(st.x_tilde - xs)
        gap_sum += ag.evaluate(p, st.x) - p.known_min
    mean_gap = gap_sum / n_seeds
    b_tilde = float((dists / n_seeds).max())
    L = 2 * p.lips
    bound = L * R * R * math.exp(-0.5 * math.sqrt(p.mu / L) * N) \
        + (1 + math.sqrt(L / p.mu)) * delta ** 2 / L + 3 * b_tilde * delta
    mean_ok = mean_gap <= 2.0 * bound
    elapsed = time.time() - t0
    _report(10, "mini-batch variance scaling and stochastic mean bound",
            ratio_ok and mean_ok and elapsed < 60.0,
            f"ratio={e1 / e4:.2f} mean_gap={mean_gap:.3f} "
            f"2x_bound={2 * bound:.3f} time={elapsed:.1f}s")


def test_criterion_11_composite_extension():
    t0 = time.time()
    cvx = pytest.importorskip("cvxpy")
    problem = make_logreg_instance(50, 10, 0.1)
    data_rng = ag.RngStream(12345)
    X = data_rng.normal(50 * 10).reshape(50, 10)
    wt = data_rng.normal(10)
    logits = X @ (wt / np.linalg.norm(wt))
    y = (data_rng.uniform(50) < 1.0 / (1.0 + np.exp(-logits))).astype(float)
    w = cvx.Variable(10)
    objective = cvx.Minimize(cvx.sum(cvx.logistic(X @ w) - cvx.multiply(y, X @ w))
                             + 0.1 * cvx.norm1(w))
    cvx.Problem(objective).solve()
    xref = np.asarray(w.value).ravel()
    fref = ag.evaluate(problem, xref)

    # per-iteration model certificates under both noise levels
    for delta in (0.0, 0.01):
        oracle = ag.Exact() if delta == 0 else ag.Absolute(delta)
        params = ag.params_for(problem, tau=1, max_iters=400)
        run_certified(problem, oracle, params, np.zeros(10), seed=0, iters=400)

    # exact-oracle convex rate against the independent reference
    x0 = np.zeros(10)
    R = float(np.linalg.norm(x0 - xref)) * (1 + 1e-4) + 1e-6
    L = 2 * problem.lips
    params = ag.params_for(problem, tau=1, max_iters=3000)
    trace = ag.run(problem, ag.Exact(), params, x0, ag.RngStream(0))
    slack = _fp_slack(4 * L * R * R + abs(fref))
    viol = sum(
        1 for N in range(1, len(trace))
        if trace.f[N] - fref > 4 * L * R * R / N ** 2 + slack)
    elapsed = time.time() - t0
    _report(11, "composite certificates and convex rate vs reference",
            viol == 0 and elapsed < 10.0,
            f"violations={viol} fref={fref:.6f} time={elapsed:.1f}s")


def test_criterion_12_budget_calculators():
    t0 = time.time()
    details = []

    # strongly convex budget
    p1 = ag.worst_case_strongly_convex(0.1, 10.0, 40)
    x0 = np.zeros(40)
    R1 = float(np.linalg.norm(x0 - p1.known_argmin))
    eps1 = 0.05
    d1, n1 = bounds.noise_budget_strongly_convex(eps1, p1.mu, p1.lips, R1)
    params = ag.params_for(p1, tau=2, max_iters=n1)
    g1 = ag.run(p1, ag.Absolute(d1), params, x0, ag.RngStream(0)).final_gap
    ok1 = g1 <= eps1
    details.append(f"strong: gap={g1:.4f}<=eps={eps1}")

    # regularization budget
    p2 = ag.worst_case_convex(1.0, 25, 50)
    x0 = np.zeros(50)
    R2 = float(np.linalg.norm(x0 - p2.known_argmin))
    eps2 = 0.1
    mu2, d2, n2 = bounds.noise_budget_regularized(eps2, 2 * p2.lips, R2)
    tr2 = stm.solve_regularized(p2, ag.Absolute(d2), eps2, R2, x0,
                                ag.RngStream(0), max_iters=n2)
    ok2 = tr2.final_gap <= eps2
    details.append(f"regularized: gap={tr2.final_gap:.4f}<=eps={eps2}")

    # linear-system residual budget with the certified stop rule
    rng = np.random.default_rng(5)
    A = rng.normal(size=(20, 20)) + 5 * np.eye(20)
    b = rng.normal(size=20)
    p3 = ag.linear_system(A, b)
    R3 = float(np.linalg.norm(p3.known_argmin))
    eps0 = 0.05
    L3 = 2 * p3.lips
    d3, n_eps0 = bounds.noise_budget_linear_system(eps0, L3, R3)
    zeta = eps0 ** 2 / 6  # objective target over three-way split
    rule = ag.KnownFstar(eps=zeta, R=R3, fstar=0.0)
    params = ag.params_for(p3, tau=1, max_iters=2 * n_eps0, stop=rule)
    tr3 = ag.run(p3, ag.Absolute(d3), params, np.zeros(20), ag.RngStream(0))
    resid = float(np.linalg.norm(A @ tr3.x_final - b))
    ok3 = tr3.status == "stopped" and resid <= eps0 and tr3.k[-1] <= n_eps0
    details.append(f"linear: resid={resid:.4f}<=eps0={eps0} "
                   f"stop={tr3.k[-1]}<= {n_eps0}")

    elapsed = time.time() - t0
    _report(12, "noise budgets reach their promised accuracy",
            ok1 and ok2 and ok3 and elapsed < 60.0,
            "; ".join(details) + f" time={elapsed:.1f}s")


def test_criterion_13_determinism(tmp_path):
    identical = True
    for exp, overrides in (("fig7", {"deltas": [0.5]}),
                           ("stochastic", {"n_seeds": 3, "trials": 2000})):
        out_a, out_b = tmp_path / f"{exp}_a", tmp_path / f"{exp}_b"
        for out in (out_a, out_b):
            cfg = ExperimentConfig(exp, seeds=(0, 1), iters=40, out=out,
                                   overlay=True, params=dict(overrides))
            run_experiment(cfg)
        fa = sorted((out_a / exp).iterdir())
        fb = sorted((out_b / exp).iterdir())
        identical = identical and [p.name for p in fa] == [p.name for p in fb]
        for pa, pb in zip(fa, fb):
            identical = identical and pa.read_bytes() == pb.read_bytes()
    _report(13, "byte-identical experiment re-runs", identical)
