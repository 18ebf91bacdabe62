"""Shared test utilities: a certifying run loop and standard problems."""

from __future__ import annotations

import numpy as np

import agmnoise as ag
from agmnoise.oracles import delta_bound
from agmnoise.stm import init_state, stm_step

REL_TOL = 1e-9


def make_ball_quadratic(n=40, mu=0.1, chi=50.0, radius=0.5):
    """Strongly convex chain quadratic restricted to a small ball."""
    base = ag.worst_case_strongly_convex(mu, chi, n)
    from dataclasses import replace
    return replace(base, feasible=ag.Ball(center=np.zeros(n), radius=radius),
                   known_min=None, known_argmin=None)


def make_logreg(samples=30, features=8, lambda1=0.1, seed=5):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(samples, features))
    y = (rng.random(samples) < 0.5).astype(float)
    return ag.logreg_l1(X, y, lambda1)


def run_certified(problem, oracle, params, x0, seed, iters, tol=REL_TOL):
    """Run the accelerated method while asserting, every iteration:

    * the weight recurrence (1 + mu_tau A_{k-1}) A_k = L alpha_k^2,
    * the three step-geometry identities,
    * the model-value step inequality,
    * the estimating-sequence certificate
      A_k f(x_k) <= psi_k(z_k) + delta_2 sum_A + delta_1 sum_cross.

    Returns the worst relative residual seen for each certificate.
    """
    rng = ag.RngStream(seed)
    state = init_state(problem, params, x0, oracle, rng)
    delta = delta_bound(oracle)
    assert delta is not None, "certificates need an absolute-error oracle"
    worst = dict(recurrence=0.0, triangles=0.0, sq_norm=0.0, cross=0.0,
                 model_step=0.0, certificate=0.0)
    for _ in range(iters):
        prev = state
        state = stm_step(state, params, problem, oracle, rng)
        L, mt = params.L, params.mu_tau

        res = abs((1.0 + mt * prev.A) * state.A - L * state.alpha ** 2)
        worst["recurrence"] = max(worst["recurrence"], res / (L * state.alpha ** 2))

        tri = state.x - state.x_tilde - (state.alpha / state.A) * (state.z - prev.z)
        worst["triangles"] = max(
            worst["triangles"],
            np.linalg.norm(tri) / (1.0 + np.linalg.norm(state.z)))

        dz = state.z - prev.z
        lhs = (1.0 + mt * prev.A) / (2.0 * state.A) * float(np.dot(dz, dz))
        dxt = state.x - state.x_tilde
        rhs = 0.5 * L * float(np.dot(dxt, dxt))
        worst["sq_norm"] = max(worst["sq_norm"], abs(lhs - rhs) / (1.0 + abs(rhs)))

        a3 = prev.A * np.linalg.norm(state.x_tilde - prev.x)
        b3 = state.alpha * np.linalg.norm(state.x_tilde - prev.z)
        worst["cross"] = max(worst["cross"], abs(a3 - b3) / (1.0 + abs(b3)))

        psi_prev = ag.evaluate_psi(prev, params, prev.z)
        psi_new = ag.evaluate_psi(state, params, state.z)
        zx = state.z - state.x_tilde
        lin = float(problem.value(state.x_tilde)) \
            + float(np.dot(state.g_tilde, zx)) + 0.5 * mt * float(np.dot(zx, zx))
        if problem.composite is not None:
            lin += float(problem.composite.value(state.z))
        lower = psi_prev + 0.5 * (1.0 + mt * prev.A) * float(np.dot(dz, dz)) \
            + state.alpha * lin
        scale = abs(psi_new) + abs(lower) + 1.0
        worst["model_step"] = max(worst["model_step"], (lower - psi_new) / scale)

        lhs_cert = state.A * ag.evaluate(problem, state.x)
        rhs_cert = psi_new + (delta ** 2 / L) * state.sum_A + delta * state.sum_cross
        scale = abs(lhs_cert) + abs(rhs_cert) + 1.0
        worst["certificate"] = max(worst["certificate"], (lhs_cert - rhs_cert) / scale)

    for name, value in worst.items():
        assert value <= tol, f"{name} residual {value} exceeds {tol}"
    return worst


def certificate_matrix():
    """(label, problem, oracle, tau, iters) combinations exercised by the
    per-iteration certificate suites."""
    convex = ag.worst_case_convex(1.0, 20, 40)
    strong = ag.worst_case_strongly_convex(0.1, 50.0, 40)
    return [
        ("convex-exact", convex, ag.Exact(), 1, 250),
        ("convex-absolute", convex, ag.Absolute(0.3), 1, 250),
        ("strong-tau1", strong, ag.Absolute(0.5), 1, 250),
        ("strong-tau2", strong, ag.Absolute(0.5), 2, 250),
        ("ball-tau2", make_ball_quadratic(), ag.Absolute(0.2), 2, 200),
        ("composite-exact", make_logreg(), ag.Exact(), 1, 250),
        ("composite-absolute", make_logreg(), ag.Absolute(0.01), 1, 250),
    ]
