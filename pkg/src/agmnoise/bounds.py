"""Closed-form convergence bounds, noise floors, thresholds, and budgets.

Every function here is pure and total on its stated domain.  Conventions
used throughout:

* ``L_f`` is the gradient Lipschitz constant of the objective and ``mu``
  its strong convexity modulus; the solvers run with the doubled effective
  constant ``L = 2 * L_f``.
* ``tau`` selects the strong-convexity model: ``tau = 1`` uses
  ``mu_1 = mu`` together with a noise floor containing the trajectory
  radius; ``tau = 2`` (valid only for ``mu > 0``) uses ``mu_2 = mu / 2``
  and a radius-free floor.
* For an absolute gradient-error level ``delta`` the derived error
  constants are ``delta_1 = delta``, ``delta_2 = delta**2 / (2 * L_f)``
  and ``delta_3 = delta**2 / mu``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple


@dataclass(frozen=True)
class BoundInputs:
    """Problem and noise constants consumed by the bound evaluators.

    ``r_tilde_N`` is the measured running radius of a finished run (the
    radius-dependent floors are trajectory-dependent); ``delta0`` is the
    initial objective gap, needed by the momentum-method envelope.
    """

    L_f: float
    mu: float = 0.0
    R: float = 0.0
    delta: float = 0.0
    alpha: float = 0.0
    eps: Optional[float] = None
    N: Optional[int] = None
    r_tilde_N: Optional[float] = None
    delta0: Optional[float] = None

    def __post_init__(self):
        if self.L_f <= 0:
            raise ValueError("L_f must be positive")
        if self.mu < 0:
            raise ValueError("mu must be non-negative")

    # -- derived constants ---------------------------------------------------

    @property
    def L(self) -> float:
        return 2.0 * self.L_f

    @property
    def mu1(self) -> float:
        return self.mu

    @property
    def mu2(self) -> float:
        return self.mu / 2.0

    def mu_tau(self, tau: int) -> float:
        if tau == 1:
            return self.mu1
        if tau == 2:
            return self.mu2
        raise ValueError("tau must be 1 or 2")

    @property
    def delta1(self) -> float:
        return self.delta

    @property
    def delta2(self) -> float:
        return self.delta ** 2 / (2.0 * self.L_f)

    @property
    def delta3(self) -> float:
        if self.mu <= 0:
            raise ValueError("delta3 requires mu > 0")
        return self.delta ** 2 / self.mu

    @property
    def chi(self) -> float:
        if self.mu <= 0:
            raise ValueError("condition number requires mu > 0")
        return self.L_f / self.mu

    def growth_theta(self, tau: int) -> float:
        return self.mu_tau(tau) / self.L

    def growth_lambda(self, tau: int) -> float:
        """Per-iteration weight growth factor 1 + theta/2 + sqrt(theta)."""
        th = self.growth_theta(tau)
        return 1.0 + 0.5 * th + math.sqrt(th)

    @property
    def stm2_lambda(self) -> float:
        return (5.0 * self.R ** 2 / 4.0) * math.sqrt(self.L / self.mu2)

    @property
    def stm2_theta(self) -> float:
        return (15.0 * self.alpha ** 2 / 4.0) * math.sqrt(self.L ** 3 / self.mu2 ** 3)


# ---------------------------------------------------------------------------
# Convergence-rate bounds
# ---------------------------------------------------------------------------


def rate_bound_strongly_convex(tau: int, inputs: BoundInputs,
                               N: Optional[int] = None) -> float:
    """Objective-gap bound after N iterations, strongly convex case.

    tau = 1:  L R^2 exp(-sqrt(mu_1/L) N / 2) + (1 + sqrt(L/mu_1)) delta_2
              + 3 r_tilde_N delta_1
    tau = 2:  L R^2 exp(-sqrt(mu_2/L) N / 2) + (1 + sqrt(L/mu_2))
              (delta_2 + delta_3)
    """
    if inputs.mu <= 0:
        raise ValueError("strongly convex bound requires mu > 0")
    if N is None:
        N = inputs.N
    if N is None:
        raise ValueError("iteration count N required")
    L, R = inputs.L, inputs.R
    mt = inputs.mu_tau(tau)
    decay = L * R ** 2 * math.exp(-0.5 * math.sqrt(mt / L) * N)
    if tau == 1:
        if inputs.r_tilde_N is None:
            raise ValueError("tau = 1 floor needs the measured radius r_tilde_N")
        return decay + (1.0 + math.sqrt(L / mt)) * inputs.delta2 \
            + 3.0 * inputs.r_tilde_N * inputs.delta1
    return decay + (1.0 + math.sqrt(L / mt)) * (inputs.delta2 + inputs.delta3)


def rate_bound_convex(inputs: BoundInputs, N: int, r_tilde_N: float) -> float:
    """Objective-gap bound after N >= 1 iterations, convex case:
    4 L R^2 / N^2 + 3 r_tilde_N delta_1 + N delta_2."""
    if N < 1:
        raise ValueError("convex-case bound requires N >= 1")
    return 4.0 * inputs.L * inputs.R ** 2 / N ** 2 \
        + 3.0 * r_tilde_N * inputs.delta1 + N * inputs.delta2


def stm2_rate_bound(inputs: BoundInputs, k: int) -> float:
    """Gap bound for the momentum method under relative noise within its
    admissible range:

    (5 L R^2 / 4 + (15/196) sqrt(2L/mu) delta0) * exp(-(k/4) sqrt(mu/(2L)))
    """
    if inputs.mu <= 0:
        raise ValueError("bound requires mu > 0")
    L, mu = inputs.L, inputs.mu
    d0 = inputs.delta0 if inputs.delta0 is not None else 0.0
    pref = 5.0 * L * inputs.R ** 2 / 4.0 + (15.0 / 196.0) * math.sqrt(2.0 * L / mu) * d0
    return pref * math.exp(-(k / 4.0) * math.sqrt(mu / (2.0 * L)))


def stm2_envelope(inputs: BoundInputs, k: int) -> float:
    """Decay envelope L * exp(-(k/4) sqrt(mu_2/L)) for the weighted gap
    recursion; only guaranteed when alpha is within the admissible range
    mu_2 / (7 L)."""
    if inputs.mu <= 0:
        raise ValueError("envelope requires mu > 0")
    if inputs.alpha > inputs.mu2 / (7.0 * inputs.L) * (1.0 + 1e-12):
        raise ValueError("alpha exceeds the admissible range; envelope not guaranteed")
    return inputs.L * math.exp(-(k / 4.0) * math.sqrt(inputs.mu2 / inputs.L))


# ---------------------------------------------------------------------------
# Model crossover and noise budgets
# ---------------------------------------------------------------------------


def tau_crossover_delta(mu: float, L_f: float, r_tilde: float) -> float:
    """Noise level below which the tau = 2 floor beats the tau = 1 floor:

        3 r_tilde / ( (1 + sqrt(L/mu)) / mu + sqrt(L/mu) (sqrt(2)-1) / L )

    The compound denominator slightly understates the exact break-even
    point, so the flip is only guaranteed a safe factor away from the
    returned value (the qualitative comparison is what this calculator is
    for).
    """
    if mu <= 0:
        raise ValueError("crossover requires mu > 0")
    L = 2.0 * L_f
    denom = (1.0 + math.sqrt(L / mu)) / mu + math.sqrt(L / mu) * (math.sqrt(2.0) - 1.0) / L
    return 3.0 * r_tilde / denom


def noise_budget_strongly_convex(eps: float, mu: float, L_f: float,
                                 R: float) -> Tuple[float, int]:
    """Largest tolerable absolute noise and sufficient iteration count to
    reach accuracy eps with the tau = 2 model.

    delta_max = sqrt(eps) sqrt(mu L_f / (mu + 2 L_f)) (1 + sqrt(4 L_f/mu))^(-1/2)
    N_min     = ceil( 2 sqrt(4 L_f/mu) ln(4 L_f R^2 / eps) )
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if mu <= 0:
        raise ValueError("mu must be positive")
    delta_max = math.sqrt(eps) * math.sqrt(mu * L_f / (mu + 2.0 * L_f)) \
        / math.sqrt(1.0 + math.sqrt(4.0 * L_f / mu))
    log_arg = 4.0 * L_f * R ** 2 / eps
    n_min = max(1, math.ceil(2.0 * math.sqrt(4.0 * L_f / mu) * max(math.log(log_arg), 0.0)))
    return delta_max, n_min


def noise_budget_regularized(eps: float, L: float, R: float) -> Tuple[float, float, int]:
    """Regularizer weight, noise budget, and iteration count for solving a
    convex problem to accuracy eps through its strongly convex
    regularization.  ``L`` is the doubled effective constant 2 L_f.

    mu        = (2/3) eps / R^2
    delta_max = (2/243)^(1/4) (1 + sqrt(2L + 4))^(-1/2) R^(-3/2) eps^(5/4)
    N_min     = ceil( 2 sqrt(2 (L + 2 mu) / mu) ln(3 (L + 2 mu) R^2 / eps) )

    The iteration count is the explicit sufficient version of the
    O(sqrt(L R^2 / eps) log(L R^2 / eps)) budget: the regularized problem
    has effective doubled constant L + 2 mu and modulus mu / 2, and the
    count drives its decay term below eps / 3.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if L <= 0 or R <= 0:
        raise ValueError("L and R must be positive")
    mu = (2.0 / 3.0) * eps / R ** 2
    delta_max = (2.0 / 243.0) ** 0.25 / math.sqrt(1.0 + math.sqrt(2.0 * L + 4.0)) \
        * R ** -1.5 * eps ** 1.25
    L_reg = L + 2.0 * mu
    log_arg = 3.0 * L_reg * R ** 2 / eps
    n_min = max(1, math.ceil(2.0 * math.sqrt(2.0 * L_reg / mu) * max(math.log(log_arg), 0.0)))
    return mu, delta_max, n_min


def noise_budget_linear_system(eps0: float, L: float, R_star: float) -> Tuple[float, int]:
    """Noise budget and stop-index bound for driving a least-squares
    residual below eps0 with the certified stopping rule.  ``L`` is the
    doubled effective constant 2 L_f.

    Solving to objective accuracy eps = eps0^2 / 2 certifies the residual;
    the rule runs at accuracy zeta = eps / 3 with

    delta_max = min( L^(1/4) eps^(3/4) / (6 sqrt(3) R_star),
                     eps / (9 R_star) )
    N_eps0    = ceil( sqrt(6 L R_star^2) / eps0 + 1 )
    """
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")
    if L <= 0 or R_star <= 0:
        raise ValueError("L and R_star must be positive")
    eps = eps0 ** 2 / 2.0
    delta_max = min(
        L ** 0.25 * eps ** 0.75 / (6.0 * math.sqrt(3.0) * R_star),
        eps / (9.0 * R_star),
    )
    n_eps0 = math.ceil(math.sqrt(6.0 * L * R_star ** 2) / eps0 + 1.0)
    return delta_max, n_eps0
