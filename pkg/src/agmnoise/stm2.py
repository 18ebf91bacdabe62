"""Momentum variant for the relative-noise, strongly convex, unconstrained
setting.

Each iteration minimizes a local quadratic model built from the gradient at
the extrapolated point y_k; on the whole space that minimizer has the
closed form used in :func:`stm2_step`, so no projection is ever needed.
The model itself is retained only as a test oracle (see
:func:`model_phi`).  The admissible relative-noise range for which the
accelerated linear rate survives is ``alpha <= mu / (28 L_f)``, returned by
:func:`max_alpha_relative`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

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
)
from .oracles import GradientOracle, RngStream, oracle_gradient


@dataclass(frozen=True)
class Stm2State:
    """Iteration state: extrapolation point y, model minimizer u, output
    combination x, and the weight pair (A, alpha)."""

    k: int
    A: float
    alpha: float
    y: Vector
    u: Vector
    x: Vector
    mu2: float
    L: float


def max_alpha_relative(mu: float, L_f: float) -> float:
    """Largest relative noise level with a guaranteed accelerated linear
    rate: (mu/2) / (7 * 2 L_f) = mu / (28 L_f)."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    if mu > L_f:
        raise ValueError("mu cannot exceed L_f")
    return mu / (28.0 * L_f)


def _solve_alpha(A_prev: float, mu2: float, L: float) -> float:
    # factored form of the positive quadratic root; c is never squared, so
    # the geometric weight growth does not overflow prematurely
    c = 1.0 + mu2 * A_prev
    return c / (2.0 * L) * (1.0 + math.sqrt(1.0 + 4.0 * L * A_prev / c))


def _check_problem(problem: Problem):
    if problem.mu <= 0:
        raise ValueError("this method requires a strongly convex problem")
    if not isinstance(problem.feasible, Unconstrained) or problem.composite is not None:
        raise ValueError("this method only supports unconstrained smooth problems")


def init_state2(problem: Problem, x_start: Vector) -> Stm2State:
    _check_problem(problem)
    x0 = as_vector(x_start)
    L = 2.0 * problem.lips
    return Stm2State(k=0, A=1.0 / L, alpha=1.0 / L, y=x0, u=x0, x=x0,
                     mu2=problem.mu / 2.0, L=L)


def stm2_step(state: Stm2State, problem: Problem, oracle: GradientOracle,
              rng: RngStream) -> Stm2State:
    """One iteration: extrapolate, query the oracle, update the model
    minimizer in closed form, and recombine."""
    _check_problem(problem)
    A_prev, mu2, L = state.A, state.mu2, state.L
    alpha = _solve_alpha(A_prev, mu2, L)
    A = A_prev + alpha
    y = (A_prev * state.x + alpha * state.u) / A
    g = oracle_gradient(oracle, problem, y, rng)
    u = ((1.0 + mu2 * A_prev) * state.u + mu2 * alpha * y - alpha * g) / (1.0 + mu2 * A)
    x = (A_prev * state.x + alpha * u) / A
    return Stm2State(k=state.k + 1, A=A, alpha=alpha, y=y, u=u, x=x, mu2=mu2, L=L)


def model_phi(state: Stm2State, u_prev: Vector, g: Vector, x):
    """The local model whose minimizer the closed-form update computes:

    phi(x) = alpha <g, x - y> + (1 + mu2 A_prev)/2 ||u_prev - x||^2
             + (mu2 alpha / 2) ||y - x||^2

    (state must be the post-step state; kept as an independent oracle for
    tests, never used by the solver.)
    """
    x = as_vector(x)
    A_prev = state.A - state.alpha
    val = state.alpha * float(np.dot(g, x - state.y))
    val += 0.5 * (1.0 + state.mu2 * A_prev) * float(np.dot(u_prev - x, u_prev - x))
    val += 0.5 * state.mu2 * state.alpha * float(np.dot(state.y - x, state.y - x))
    return val


def run2(problem: Problem, oracle: GradientOracle, x_start: Vector,
         max_iters: int, rng: RngStream) -> Trace:
    """Run the method; the trace reports progress at the extrapolation
    points y_k, where the guaranteed rate is stated."""
    state = init_state2(problem, x_start)
    tracker = MetricTracker(problem)
    trace = Trace()
    r_t = tracker.observe_points(state.y, state.u, state.x)
    f_val, gap, gnorm, dist = tracker.row(state.y)
    trace.append(0, f_val, gap, gnorm, dist, state.A, state.alpha, r_t)
    for _ in range(max_iters):
        state = stm2_step(state, problem, oracle, rng)
        if not (is_admissible(state.y) and is_admissible(state.u)):
            trace.status = STATUS_DIVERGED
            break
        f_val, gap, gnorm, dist = tracker.row(state.y)
        if not np.isfinite(f_val):
            trace.status = STATUS_DIVERGED
            break
        r_t = tracker.observe_points(state.y, state.u, state.x)
        trace.append(state.k, f_val, gap, gnorm, dist, state.A, state.alpha, r_t)
    trace.x_final = state.y
    return trace
