"""Accelerated gradient methods under absolute, relative, and stochastic
gradient noise: solvers, noise oracles, benchmark problems, convergence
bounds, and an experiment runner."""

from .core import (
    Ball,
    Box,
    CompositeTerm,
    DIVERGENCE_RADIUS,
    Problem,
    Trace,
    Unconstrained,
    ViaProx,
    evaluate,
    gradient,
    project,
)
from .oracles import (
    Absolute,
    ConstantBias,
    Exact,
    FiniteDifference,
    MeasuredRelative,
    MiniBatch,
    Relative,
    RngStream,
    Stochastic,
    delta_bound,
    finite_difference_gradient,
    minibatch_variance_estimate,
    oracle_gradient,
    sphere_noise,
)
from .stm import (
    Adaptive,
    KnownFstar,
    MaxIters,
    NoStop,
    StmParams,
    StmState,
    argmin_psi,
    choose_tau,
    evaluate_psi,
    init_state,
    n_max,
    params_for,
    run,
    solve_alpha,
    solve_regularized,
    stm_step,
    stop_adaptive,
    stop_known_fstar,
)
from .stm2 import Stm2State, init_state2, max_alpha_relative, run2, stm2_step
from .baselines import TmmParams, gd_run, tmm_alpha_threshold, tmm_params, tmm_run
from .testbed import (
    diagonal_quadratic,
    finite_sum,
    l1_term,
    linear_system,
    load_logreg_data,
    logreg_l1,
    logreg_l1_from_file,
    worst_case_convex,
    worst_case_strongly_convex,
)
from .bounds import (
    BoundInputs,
    noise_budget_linear_system,
    noise_budget_regularized,
    noise_budget_strongly_convex,
    rate_bound_convex,
    rate_bound_strongly_convex,
    stm2_envelope,
    stm2_rate_bound,
    tau_crossover_delta,
)

__version__ = "0.1.0"
