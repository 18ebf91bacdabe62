"""Non-accelerated gradient descent and the Triple Momentum baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    MetricTracker,
    Problem,
    STATUS_DIVERGED,
    Trace,
    Unconstrained,
    Vector,
    as_vector,
    is_admissible,
    project,
)
from .oracles import GradientOracle, RngStream, oracle_gradient


def gd_run(problem: Problem, oracle: GradientOracle, step: float,
           x_start: Vector, max_iters: int, rng: RngStream) -> Trace:
    """Plain inexact gradient descent x_{k+1} = proj(x_k - step * g~(x_k))."""
    if step <= 0:
        raise ValueError("step size must be positive")
    if problem.composite is not None:
        raise ValueError("gradient descent baseline handles smooth problems only")
    x = project(problem.feasible, as_vector(x_start))
    tracker = MetricTracker(problem)
    trace = Trace()
    r_t = tracker.observe_points(x)
    f_val, gap, gnorm, dist = tracker.row(x)
    trace.append(0, f_val, gap, gnorm, dist, None, None, r_t)
    for k in range(1, max_iters + 1):
        g = oracle_gradient(oracle, problem, x, rng)
        x = project(problem.feasible, x - step * g)
        if not is_admissible(x):
            trace.status = STATUS_DIVERGED
            break
        f_val, gap, gnorm, dist = tracker.row(x)
        if not np.isfinite(f_val):
            trace.status = STATUS_DIVERGED
            break
        r_t = tracker.observe_points(x)
        trace.append(k, f_val, gap, gnorm, dist, None, None, r_t)
    trace.x_final = x
    return trace


@dataclass(frozen=True)
class TmmParams:
    """Triple Momentum coefficients in the standard parameterization

        rho      = 1 - 1/sqrt(chi)
        step     = (1 + rho) / L_f
        beta     = rho^2 / (2 - rho)
        gamma    = rho^2 / ((1 + rho) (2 - rho))
        delta_tm = rho^2 / (1 - rho^2)

    with chi = L_f / mu the condition number.  This is a baseline choice:
    the coefficients are the published defaults, not a contribution of this
    library.
    """

    rho: float
    beta: float
    gamma: float
    delta_tm: float
    step: float


def tmm_params(chi: float, L_f: float) -> TmmParams:
    if chi <= 1:
        raise ValueError("condition number chi must exceed 1")
    rho = 1.0 - 1.0 / math.sqrt(chi)
    return TmmParams(
        rho=rho,
        beta=rho * rho / (2.0 - rho),
        gamma=rho * rho / ((1.0 + rho) * (2.0 - rho)),
        delta_tm=rho * rho / (1.0 - rho * rho),
        step=(1.0 + rho) / L_f,
    )


def tmm_alpha_threshold(chi: float) -> float:
    """Relative-noise level below which Triple Momentum retains a linear
    rate: (sqrt(chi) + 1) / (4 chi - 3 sqrt(chi) + 1)."""
    if chi <= 1:
        raise ValueError("condition number chi must exceed 1")
    s = math.sqrt(chi)
    return (s + 1.0) / (4.0 * chi - 3.0 * s + 1.0)


def tmm_run(problem: Problem, oracle: GradientOracle, x_start: Vector,
            max_iters: int, rng: RngStream) -> Trace:
    """Triple Momentum iteration

        xi_{k+1} = (1 + beta) xi_k - beta xi_{k-1} - step * g~(y_k)
        y_k      = (1 + gamma) xi_k - gamma xi_{k-1}
        x_k      = (1 + delta_tm) xi_k - delta_tm xi_{k-1}

    started from xi_0 = xi_{-1} = x_start; the trace follows x_k.
    """
    if problem.mu <= 0:
        raise ValueError("Triple Momentum requires a strongly convex problem")
    if not isinstance(problem.feasible, Unconstrained) or problem.composite is not None:
        raise ValueError("Triple Momentum handles unconstrained smooth problems only")
    p = tmm_params(problem.lips / problem.mu, problem.lips)
    xi_prev = as_vector(x_start).copy()
    xi = xi_prev.copy()
    x = xi.copy()
    tracker = MetricTracker(problem)
    trace = Trace()
    r_t = tracker.observe_points(x)
    f_val, gap, gnorm, dist = tracker.row(x)
    trace.append(0, f_val, gap, gnorm, dist, None, None, r_t)
    for k in range(1, max_iters + 1):
        y = (1.0 + p.gamma) * xi - p.gamma * xi_prev
        g = oracle_gradient(oracle, problem, y, rng)
        xi_next = (1.0 + p.beta) * xi - p.beta * xi_prev - p.step * g
        x = (1.0 + p.delta_tm) * xi_next - p.delta_tm * xi
        xi_prev, xi = xi, xi_next
        if not (is_admissible(x) and is_admissible(xi)):
            trace.status = STATUS_DIVERGED
            break
        f_val, gap, gnorm, dist = tracker.row(x)
        if not np.isfinite(f_val):
            trace.status = STATUS_DIVERGED
            break
        r_t = tracker.observe_points(x, y)
        trace.append(k, f_val, gap, gnorm, dist, None, None, r_t)
    trace.x_final = x
    return trace
