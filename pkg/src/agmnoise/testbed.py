"""Constructors for the benchmark problems used across the experiments."""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import solve_banded
from scipy.special import expit

from .core import CompositeTerm, Problem, Vector, as_vector

# Declared smoothness constants estimated by power iteration are inflated by
# this factor so that sampled smoothness checks can be strict.
_SAFETY = 1.0 + 1e-6


def power_iteration(matvec, dim: int, iters: int = 200, tol: float = 1e-10) -> float:
    """Largest eigenvalue of a PSD operator by power iteration."""
    v = np.ones(dim) / math.sqrt(dim)
    v += np.linspace(0.0, 1e-3, dim)  # break symmetry deterministically
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = matvec(v)
        lam_new = float(np.dot(v, w))
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        if abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)):
            lam = lam_new
            break
        lam = lam_new
    return lam


# ---------------------------------------------------------------------------
# Worst-case smooth functions
# ---------------------------------------------------------------------------


def worst_case_convex(L_f: float, k: int, n: int) -> Problem:
    """Chain-structured quadratic that is the hard instance for first-order
    methods in the convex regime:

        f(x) = (L/8) (x_1^2 + sum_{j=1}^{k-1} (x_j - x_{j+1})^2 + x_k^2)
               - (L/4) x_1

    on the first k of n coordinates, with minimizer x*_i = 1 - i/(k+1) for
    i <= k and 0 beyond.  The consecutive-difference sum starts at j = 1;
    with that indexing the listed minimizer is exactly stationary.  The
    Hessian is (L/4) times a tridiagonal operator of norm at most 4, so the
    declared smoothness constant is the scale parameter itself.
    """
    if not (1 <= k <= n):
        raise ValueError("need 1 <= k <= n")
    if L_f <= 0:
        raise ValueError("L_f must be positive")
    L = float(L_f)

    def tri(v):  # tridiagonal (2, -1) operator on the leading k block
        out = np.zeros_like(v)
        blk = v[:k]
        out[:k] = 2.0 * blk
        out[:k - 1] -= blk[1:]
        out[1:k] -= blk[:-1]
        return out

    def value(x):
        q = float(np.dot(x, tri(x)))
        return (L / 8.0) * q - (L / 4.0) * x[0]

    def grad(x):
        g = (L / 4.0) * tri(x)
        g[0] -= L / 4.0
        return g

    xstar = np.zeros(n)
    xstar[:k] = 1.0 - np.arange(1, k + 1) / (k + 1.0)
    return Problem(dim=n, value=value, grad=grad, lips=L, mu=0.0,
                   known_min=value(xstar), known_argmin=xstar)


def worst_case_strongly_convex(mu: float, chi: float, n: int) -> Problem:
    """Strongly convex chain quadratic with condition number chi:

        f(x) = (mu (chi - 1) / 8) (x_1^2 + sum_{j=1}^{n-1} (x_j - x_{j+1})^2
               - 2 x_1) + (mu / 2) ||x||^2

    The declared constants are exact: smoothness mu * chi and modulus mu.
    The minimizer solves the tridiagonal stationarity system and is
    computed by a banded solve (no closed form is assumed).
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    if chi <= 1:
        raise ValueError("chi must exceed 1")
    c = mu * (chi - 1.0) / 4.0

    def band(v):  # tridiagonal (2, -1) with trailing diagonal entry 1
        out = 2.0 * v
        out[-1] = v[-1]
        out[:-1] -= v[1:]
        out[1:] -= v[:-1]
        return out

    e1 = np.zeros(n)
    e1[0] = 1.0

    def value(x):
        q = float(np.dot(x, band(x)))
        return (c / 2.0) * (q - 2.0 * x[0]) + 0.5 * mu * float(np.dot(x, x))

    def grad(x):
        return c * (band(x) - e1) + mu * x

    # stationarity: (c B + mu I) x = c e_1, solved in banded form
    ab = np.zeros((3, n))
    ab[0, 1:] = -c
    ab[1, :] = 2.0 * c + mu
    ab[1, -1] = c + mu
    ab[2, :-1] = -c
    rhs = np.zeros(n)
    rhs[0] = c
    xstar = solve_banded((1, 1), ab, rhs) if c > 0 else np.zeros(n)
    return Problem(dim=n, value=value, grad=grad, lips=mu * chi, mu=mu,
                   known_min=value(xstar), known_argmin=xstar)


# ---------------------------------------------------------------------------
# Simple quadratics
# ---------------------------------------------------------------------------


def diagonal_quadratic(lambdas) -> Problem:
    """f(x) = 0.5 sum_i lambda_i x_i^2 with minimizer at the origin."""
    lam = as_vector(lambdas)
    if np.any(lam < 0):
        raise ValueError("eigenvalues must be non-negative")
    if float(lam.max()) <= 0:
        raise ValueError("at least one eigenvalue must be positive")
    n = lam.shape[0]
    return Problem(
        dim=n,
        value=lambda x: 0.5 * float(np.dot(lam, x * x)),
        grad=lambda x: lam * x,
        lips=float(lam.max()),
        mu=float(lam.min()),
        known_min=0.0,
        known_argmin=np.zeros(n),
    )


def linear_system(A, b) -> Problem:
    """Least squares f(x) = 0.5 ||A x - b||^2 for a square system.

    The smoothness constant is the top eigenvalue of A^T A estimated by
    power iteration (with a tiny safety inflation); a nonsingular system
    has optimal value zero at the exact solution.
    """
    A = np.asarray(A, dtype=np.float64)
    b = as_vector(b)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be a square matrix")
    if A.shape[0] != b.shape[0]:
        raise ValueError("A and b dimensions do not match")
    n = A.shape[1]
    lips = power_iteration(lambda v: A.T @ (A @ v), n) * _SAFETY
    xstar = np.linalg.solve(A, b)
    return Problem(
        dim=n,
        value=lambda x: 0.5 * float(np.dot(A @ x - b, A @ x - b)),
        grad=lambda x: A.T @ (A @ x - b),
        lips=lips,
        mu=0.0,
        known_min=0.0,
        known_argmin=xstar,
    )


# ---------------------------------------------------------------------------
# Composite and finite-sum problems
# ---------------------------------------------------------------------------


def soft_threshold(v: Vector, t: float) -> Vector:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def l1_term(lambda1: float) -> CompositeTerm:
    """r(x) = lambda1 ||x||_1 with its soft-threshold prox."""
    if lambda1 < 0:
        raise ValueError("lambda1 must be non-negative")
    return CompositeTerm(
        value=lambda x: lambda1 * float(np.sum(np.abs(x))),
        prox=lambda v, t: soft_threshold(v, t * lambda1),
    )


def logreg_l1(features, labels, lambda1: float) -> Problem:
    """Logistic regression with an l1 penalty.

    Smooth part: the negative log-likelihood
        sum_i [ log(1 + exp(z_i)) - y_i z_i ],  z_i = <x, X_i>,
    with labels y_i in {0, 1}; its gradient is X^T (sigma(z) - y) and the
    smoothness constant is a quarter of the top eigenvalue of X^T X.
    Nonsmooth part: lambda1 ||x||_1 with the soft-threshold prox.
    """
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("feature matrix must be non-empty and 2-d")
    if y.shape != (X.shape[0],):
        raise ValueError("labels must be one per sample")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    n = X.shape[1]

    def value(x):
        z = X @ x
        return float(np.sum(np.logaddexp(0.0, z) - y * z))

    def grad(x):
        z = X @ x
        return X.T @ (expit(z) - y)

    lips = 0.25 * power_iteration(lambda v: X.T @ (X @ v), n) * _SAFETY
    return Problem(dim=n, value=value, grad=grad, lips=lips, mu=0.0,
                   composite=l1_term(lambda1))


def load_logreg_data(path, delimiter=None):
    """Load a plain-text delimited dataset: one sample per line, label in
    the last column.  Returns (features, labels)."""
    data = np.loadtxt(path, delimiter=delimiter, ndmin=2)
    if data.shape[1] < 2:
        raise ValueError("dataset needs at least one feature column plus labels")
    return data[:, :-1], data[:, -1]


def logreg_l1_from_file(path, lambda1: float, delimiter=None) -> Problem:
    X, y = load_logreg_data(path, delimiter=delimiter)
    return logreg_l1(X, y, lambda1)


def finite_sum(components: Sequence[Problem]) -> Problem:
    """Average objective f = (1/M) sum_i f_i exposing its components to the
    mini-batch oracle.  The averaged smoothness/strong-convexity constants
    are valid moduli for the mean."""
    comps = tuple(components)
    if not comps:
        raise ValueError("finite sum needs at least one component")
    n = comps[0].dim
    if any(c.dim != n for c in comps):
        raise ValueError("components must share one dimension")
    if any(c.composite is not None for c in comps):
        raise ValueError("finite-sum components must be smooth")
    M = len(comps)

    def value(x):
        return sum(float(c.value(x)) for c in comps) / M

    def grad(x):
        g = np.zeros(n)
        for c in comps:
            g += c.grad(x)
        return g / M

    return Problem(
        dim=n,
        value=value,
        grad=grad,
        lips=sum(c.lips for c in comps) / M,
        mu=sum(c.mu for c in comps) / M,
        components=comps,
    )
