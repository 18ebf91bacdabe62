"""Similar Triangles Method with inexact gradients.

The solver maintains an estimating sequence psi_k: a 1-strongly-convex
quadratic model accumulated from the linearizations collected at the
momentum points.  Its minimizer drives the momentum step, and the whole
function is reconstructed from five O(n)/O(1) accumulators instead of
stored history, so memory stays constant:

    psi_k(x) = 0.5 ||x - x0~||^2
               + sum_j alpha_j [ f(x_j~) + <g_j~, x - x_j~>
                                 + (mu_tau/2) ||x - x_j~||^2 ]
               (+ A_k r(x) in composite mode)

with g_j~ the oracle gradient at the momentum point x_j~.  The five sums
(weighted gradients, points, values, inner products, and squared norms)
recover psi_k exactly.

Two strong-convexity models are supported: tau = 1 runs with mu_tau = mu,
tau = 2 (requiring mu > 0) with mu_tau = mu / 2.  The composite variant
adds the weight A_k on the nonsmooth term; completing the square in psi_k
shows its minimizer is the prox of the unconstrained center with weight
A_k / (1 + mu_tau A_k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from . import bounds as _bounds
from .core import (
    DIVERGENCE_RADIUS,
    CompositeTerm,
    MetricTracker,
    Problem,
    STATUS_DIVERGED,
    STATUS_OK,
    STATUS_STOPPED,
    Trace,
    Unconstrained,
    Vector,
    ViaProx,
    as_vector,
    evaluate,
    is_admissible,
    project,
)
from .oracles import FiniteDifference, GradientOracle, RngStream, delta_bound, oracle_gradient

# ---------------------------------------------------------------------------
# Parameters and stop rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoStop:
    """Run until the iteration limit."""


@dataclass(frozen=True)
class MaxIters:
    """Run until the iteration limit (alias of :class:`NoStop`)."""


@dataclass(frozen=True)
class KnownFstar:
    """Certified stop rule for a known optimal value.

    Fires at the first iterate with
    f(x_k) - fstar <= (delta_2 / A_k) sum_j A_j + 3 R delta_1 + eps.
    Until it fires, the trajectory provably stays within radius R of the
    minimizer.
    """

    eps: float
    R: float
    fstar: float

    def __post_init__(self):
        if self.eps <= 0 or self.R <= 0:
            raise ValueError("eps and R must be positive")


@dataclass(frozen=True)
class Adaptive:
    """Online variant of :class:`KnownFstar` that replaces the worst-case
    radius term with the measured cross-step sum; it can fire much earlier
    and carries the post-hoc certificate
    f(x_k) - fstar <= delta_2 (k+1) + 3 R delta_1 + eps."""

    eps: float
    R: float
    fstar: float

    def __post_init__(self):
        if self.eps <= 0 or self.R <= 0:
            raise ValueError("eps and R must be positive")


StopRule = Union[NoStop, MaxIters, KnownFstar, Adaptive]


@dataclass(frozen=True)
class StmParams:
    """Solver constants: doubled smoothness L = 2 L_f, model modulus
    mu_tau, model selector tau, iteration limit, and stop rule."""

    L: float
    mu_tau: float
    tau: int = 1
    max_iters: int = 1000
    stop: StopRule = field(default_factory=NoStop)

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("L must be positive")
        if self.mu_tau < 0:
            raise ValueError("mu_tau must be non-negative")
        if self.tau not in (1, 2):
            raise ValueError("tau must be 1 or 2")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")


def choose_tau(problem: Problem, delta: float = 0.0,
               r_tilde: Optional[float] = None) -> int:
    """Default model selector: tau = 2 whenever mu > 0 and the noise level
    sits below the floor crossover (there the radius-free floor is the
    smaller one), else tau = 1."""
    if problem.mu <= 0:
        return 1
    if delta <= 0:
        return 2
    rt = r_tilde if r_tilde is not None else 1.0
    cross = _bounds.tau_crossover_delta(problem.mu, problem.lips, rt)
    return 2 if delta < cross else 1


def params_for(problem: Problem, tau: Optional[int] = None, delta: float = 0.0,
               max_iters: int = 1000, stop: StopRule = NoStop(),
               r_tilde: Optional[float] = None) -> StmParams:
    """Build :class:`StmParams` from a problem; tau defaults per
    :func:`choose_tau` and may be overridden."""
    if tau is None:
        tau = choose_tau(problem, delta, r_tilde)
    if tau == 2 and problem.mu <= 0:
        raise ValueError("tau = 2 requires a strongly convex problem")
    mu_tau = problem.mu if tau == 1 else problem.mu / 2.0
    return StmParams(L=2.0 * problem.lips, mu_tau=mu_tau, tau=tau,
                     max_iters=max_iters, stop=stop)


# ---------------------------------------------------------------------------
# Iteration state
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StmState:
    """Full iteration state after step k.

    ``acc_*`` are the estimating-sequence accumulators; ``sum_cross`` is
    the running sum of alpha_j ||x_j~ - z_{j-1}|| feeding the adaptive
    stop rule, and ``sum_A`` the running sum of the weights A_j.
    ``g_tilde`` is the oracle gradient used at this step's momentum point.
    """

    k: int
    A: float
    alpha: float
    x_tilde0: Vector
    z: Vector
    x: Vector
    x_tilde: Vector
    g_tilde: Vector
    acc_grad: Vector      # sum alpha_j g_j~
    acc_point: Vector     # sum alpha_j x_j~
    acc_f: float          # sum alpha_j f(x_j~)        (smooth part)
    acc_inner: float      # sum alpha_j <g_j~, x_j~>
    acc_sq: float         # sum alpha_j ||x_j~||^2
    sum_cross: float
    sum_A: float
    composite: Optional[CompositeTerm] = None


def solve_alpha(A_prev: float, mu_tau: float, L: float) -> float:
    """Positive root of (1 + mu_tau A_prev)(A_prev + alpha) = L alpha^2.

    Written in factored form, alpha = c/(2L) (1 + sqrt(1 + 4 L A_prev / c))
    with c = 1 + mu_tau A_prev, which survives the geometric growth of the
    weights far longer than the naive quadratic formula (c is never squared).
    """
    c = 1.0 + mu_tau * A_prev
    return c / (2.0 * L) * (1.0 + math.sqrt(1.0 + 4.0 * L * A_prev / c))


def argmin_psi(state: StmState, params: StmParams, problem: Problem) -> Vector:
    """Minimizer of the current estimating sequence over the feasible set.

    Unconstrained, the quadratic part collapses to a single center point;
    a constraint set projects that center, and a composite term applies
    its prox with weight A / (1 + mu_tau A).
    """
    denom = 1.0 + params.mu_tau * state.A
    center = (state.x_tilde0 + params.mu_tau * state.acc_point - state.acc_grad) / denom
    if problem.composite is not None:
        return problem.composite.prox(center, state.A / denom)
    if isinstance(problem.feasible, Unconstrained):
        return center
    return project(problem.feasible, center)


def evaluate_psi(state: StmState, params: StmParams, x: Vector) -> float:
    """Value of the estimating sequence at ``x``, reconstructed from the
    accumulators (plus A r(x) in composite mode)."""
    x = as_vector(x)
    val = 0.5 * float(np.dot(x - state.x_tilde0, x - state.x_tilde0))
    val += state.acc_f - state.acc_inner + float(np.dot(state.acc_grad, x))
    if params.mu_tau > 0:
        val += 0.5 * params.mu_tau * (
            state.A * float(np.dot(x, x))
            - 2.0 * float(np.dot(state.acc_point, x))
            + state.acc_sq
        )
    if state.composite is not None:
        val += state.A * float(state.composite.value(x))
    return val


def init_state(problem: Problem, params: StmParams, x_start: Vector,
               oracle: GradientOracle, rng: RngStream) -> StmState:
    """Initialization: anchor at the (projected) start, weights 1/L, one
    oracle call, and the first model minimizer, which is also x_0."""
    x0t = project(problem.feasible, as_vector(x_start))
    alpha0 = 1.0 / params.L
    g0 = oracle_gradient(oracle, problem, x0t, rng)
    f0 = float(problem.value(x0t))
    state = StmState(
        k=0,
        A=alpha0,
        alpha=alpha0,
        x_tilde0=x0t,
        z=x0t,  # placeholder until the model minimizer is known
        x=x0t,
        x_tilde=x0t,
        g_tilde=g0,
        acc_grad=alpha0 * g0,
        acc_point=alpha0 * x0t,
        acc_f=alpha0 * f0,
        acc_inner=alpha0 * float(np.dot(g0, x0t)),
        acc_sq=alpha0 * float(np.dot(x0t, x0t)),
        sum_cross=0.0,
        sum_A=alpha0,
        composite=problem.composite,
    )
    z0 = argmin_psi(state, params, problem)
    return replace(state, z=z0, x=z0)


def stm_step(state: StmState, params: StmParams, problem: Problem,
             oracle: GradientOracle, rng: RngStream) -> StmState:
    """One full iteration: new weight, momentum point, oracle call,
    accumulator update, model minimizer, and the similar-triangles
    combination for the new iterate."""
    A_prev, z_prev, x_prev = state.A, state.z, state.x
    alpha = solve_alpha(A_prev, params.mu_tau, params.L)
    A = A_prev + alpha
    x_tilde = (A_prev * x_prev + alpha * z_prev) / A
    g = oracle_gradient(oracle, problem, x_tilde, rng)
    f_t = float(problem.value(x_tilde))
    mid = replace(
        state,
        k=state.k + 1,
        A=A,
        alpha=alpha,
        x_tilde=x_tilde,
        g_tilde=g,
        acc_grad=state.acc_grad + alpha * g,
        acc_point=state.acc_point + alpha * x_tilde,
        acc_f=state.acc_f + alpha * f_t,
        acc_inner=state.acc_inner + alpha * float(np.dot(g, x_tilde)),
        acc_sq=state.acc_sq + alpha * float(np.dot(x_tilde, x_tilde)),
        sum_cross=state.sum_cross + alpha * float(np.linalg.norm(x_tilde - z_prev)),
        sum_A=state.sum_A + A,
    )
    z = argmin_psi(mid, params, problem)
    x = (A_prev * x_prev + alpha * z) / A
    return replace(mid, z=z, x=x)


# ---------------------------------------------------------------------------
# Stop rules
# ---------------------------------------------------------------------------


def n_max(L: float, R: float, eps: float) -> int:
    """Iteration budget ceil(sqrt(2 L R^2 / eps)) within which the
    certified stop rule is guaranteed to fire."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if L <= 0 or R <= 0:
        raise ValueError("L and R must be positive")
    return math.ceil(math.sqrt(2.0 * L * R * R / eps))


def stop_known_fstar(state: StmState, params: StmParams, problem: Problem,
                     fstar: float, R: float, eps: float, delta: float) -> bool:
    """Certified stop test: f(x_k) - fstar <= (delta_2/A_k) sum_A
    + 3 R delta_1 + eps."""
    gap = evaluate(problem, state.x) - fstar
    delta2 = delta * delta / params.L
    return gap <= delta2 * state.sum_A / state.A + 3.0 * R * delta + eps


def stop_adaptive(state: StmState, params: StmParams, problem: Problem,
                  fstar: float, R: float, eps: float, delta: float) -> bool:
    """Adaptive stop test with the measured cross-step sum in place of two
    thirds of the worst-case radius term:

        f(x_k) - fstar <= (delta_2/A_k) sum_A + R delta_1
                          + (delta_1/A_k) sum_cross + eps

    The cross-step sum enters normalized by A_k; that is the form the
    radius-bound induction needs, and the one under which a fired test
    implies the certificate delta_2 (k+1) + 3 R delta_1 + eps (the sum is
    at most 2 R A_k while the trajectory stays within radius R).
    """
    gap = evaluate(problem, state.x) - fstar
    delta2 = delta * delta / params.L
    return gap <= delta2 * state.sum_A / state.A + R * delta \
        + delta * state.sum_cross / state.A + eps


def _rule_fires(state: StmState, params: StmParams, problem: Problem,
                oracle: GradientOracle, rng: RngStream) -> bool:
    rule = params.stop
    if isinstance(rule, (NoStop, MaxIters)):
        return False
    delta = delta_bound(oracle)
    eps = rule.eps
    if isinstance(oracle, FiniteDifference):
        # Only noisy values exist here: test against a perturbed objective
        # and widen the accuracy target by the value-noise band.
        delta = math.sqrt(problem.dim) * oracle.delta_f / oracle.h
        eps = eps + 2.0 * oracle.delta_f
        fstar = rule.fstar - float(rng.symmetric_uniform(oracle.delta_f))
    else:
        fstar = rule.fstar
    if delta is None:
        raise ValueError("stop rules need an oracle with a bounded absolute error")
    if isinstance(rule, KnownFstar):
        return stop_known_fstar(state, params, problem, fstar, rule.R, eps, delta)
    if isinstance(rule, Adaptive):
        return stop_adaptive(state, params, problem, fstar, rule.R, eps, delta)
    raise TypeError(f"unknown stop rule {rule!r}")


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------


def run(problem: Problem, oracle: GradientOracle, params: StmParams,
        x_start: Vector, rng: RngStream, metrics_problem: Optional[Problem] = None,
        keep_iterates: bool = False) -> Trace:
    """Run the method and record a trace row per iteration.

    ``metrics_problem`` redirects the recorded gap/distance columns to a
    different objective (used by the regularization reduction, which solves
    a shifted problem but reports progress on the original).  Divergence
    (non-finite values or iterates beyond the admissible radius) ends the
    run with a ``diverged`` status instead of raising.
    """
    tracker = MetricTracker(metrics_problem if metrics_problem is not None else problem)
    trace = Trace()
    if keep_iterates:
        trace.iterates = []

    state = init_state(problem, params, x_start, oracle, rng)
    if not is_admissible(state.x):
        trace.status = STATUS_DIVERGED
        trace.x_final = state.x
        return trace
    r_t = tracker.observe_points(state.x_tilde0, state.z, state.x)
    f_val, gap, gnorm, dist = tracker.row(state.x)
    fired = _rule_fires(state, params, problem, oracle, rng)
    trace.append(0, f_val, gap, gnorm, dist, state.A, state.alpha, r_t, stopped=fired)
    if keep_iterates:
        trace.iterates.append(state.x.copy())

    if fired:
        trace.status = STATUS_STOPPED
        trace.x_final = state.x
        return trace

    for _ in range(params.max_iters):
        state = stm_step(state, params, problem, oracle, rng)
        if not (is_admissible(state.x) and is_admissible(state.z)
                and np.isfinite(state.acc_f)):
            trace.status = STATUS_DIVERGED
            break
        f_val, gap, gnorm, dist = tracker.row(state.x)
        if not np.isfinite(f_val):
            trace.status = STATUS_DIVERGED
            break
        r_t = tracker.observe_points(state.x_tilde, state.z, state.x)
        fired = _rule_fires(state, params, problem, oracle, rng)
        trace.append(state.k, f_val, gap, gnorm, dist, state.A, state.alpha, r_t,
                     stopped=fired)
        if keep_iterates:
            trace.iterates.append(state.x.copy())
        if fired:
            trace.status = STATUS_STOPPED
            break

    trace.x_final = state.x
    return trace


def solve_regularized(problem: Problem, oracle: GradientOracle, eps: float,
                      R: float, x_start: Vector, rng: RngStream,
                      max_iters: Optional[int] = None) -> Trace:
    """Solve a merely convex problem through its strongly convex
    regularization.

    Adds the proximal term (mu/2) ||x - x_start||^2 with mu = (2/3) eps / R^2
    (so the regularization bias costs at most eps / 3), runs the tau = 2
    model on the shifted problem with smoothness lips + mu, and reports all
    trace metrics against the original objective.  The default iteration
    count drives the decay term of the shifted problem below eps / 3.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if problem.mu != 0:
        raise ValueError("regularization reduction expects a mu = 0 problem")
    anchor = project(problem.feasible, as_vector(x_start))
    mu = (2.0 / 3.0) * eps / (R * R)

    base_value, base_grad = problem.value, problem.grad

    def reg_value(x):
        d = x - anchor
        return base_value(x) + 0.5 * mu * float(np.dot(d, d))

    def reg_grad(x):
        return base_grad(x) + mu * (x - anchor)

    reg_problem = Problem(
        dim=problem.dim,
        value=reg_value,
        grad=reg_grad,
        lips=problem.lips + mu,
        mu=mu,
        composite=problem.composite,
        feasible=problem.feasible,
        components=None,
    )
    if max_iters is None:
        L_reg = 2.0 * reg_problem.lips
        log_arg = 3.0 * L_reg * R * R / eps
        max_iters = max(1, math.ceil(
            2.0 * math.sqrt(2.0 * L_reg / mu) * max(math.log(log_arg), 0.0)))
    params = StmParams(L=2.0 * reg_problem.lips, mu_tau=mu / 2.0, tau=2,
                       max_iters=max_iters)
    return run(reg_problem, oracle, params, anchor, rng, metrics_problem=problem)
