"""Inexact gradient oracles and the deterministic random stream behind them.

Noise realizations
------------------
The absolute-noise oracle perturbs the exact gradient by a vector drawn
uniformly from the sphere of radius ``delta``, so its error bound holds with
equality on every draw; the relative-noise oracle uses radius
``alpha * ||grad f(x)||`` and therefore returns the exact (zero) gradient at
stationary points.  Worst-case magnitudes make bound violations maximally
detectable.  The stochastic oracle scales the radius by an independent
uniform draw from [0, 1], which keeps the noise zero-mean with second moment
strictly below ``delta**2``.  Solvers never assume unbiasedness.

Determinism
-----------
All randomness flows through :class:`RngStream`, a counter-based Philox
generator whose uniform doubles feed an explicit Box-Muller transform for
Gaussian draws (sphere directions are normalized Gaussians).  Two streams
constructed from the same seed produce bit-identical sequences on any
platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .core import Problem, Vector, as_vector, check_dim, gradient

# ---------------------------------------------------------------------------
# Random stream
# ---------------------------------------------------------------------------


class RngStream:
    """Seeded, counter-based random stream with a pinned sampling algorithm.

    Uniform doubles come straight from the Philox bit generator; normal
    draws are produced by Box-Muller on those uniforms rather than the
    generator's own ziggurat, so the sampled sequence is a documented
    function of the seed alone.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.Philox(key=self.seed))

    def uniform(self, size=None):
        """Uniform draws on [0, 1)."""
        return self._gen.random(size)

    def symmetric_uniform(self, half_width: float, size=None):
        """Uniform draws on [-half_width, half_width]."""
        return (2.0 * self._gen.random(size) - 1.0) * half_width

    def normal(self, size: int) -> Vector:
        """Standard normal draws via Box-Muller."""
        pairs = (size + 1) // 2
        u1 = 1.0 - self._gen.random(pairs)  # in (0, 1], keeps log finite
        u2 = self._gen.random(pairs)
        r = np.sqrt(-2.0 * np.log(u1))
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(2.0 * np.pi * u2)
        out[1::2] = r * np.sin(2.0 * np.pi * u2)
        return out[:size]

    def indices(self, n: int, size: int) -> np.ndarray:
        """``size`` indices drawn uniformly from range(n), with replacement."""
        u = self._gen.random(size)
        return np.minimum((u * n).astype(np.int64), n - 1)

    def spawn(self, index: int) -> "RngStream":
        """Independent child stream; used to give grid cells their own state."""
        return RngStream((self.seed * 2654435761 + index + 1) % (1 << 63))


def sphere_noise(rng: RngStream, dim: int, magnitude: float) -> Vector:
    """A vector uniformly distributed on the sphere of the given radius.

    The distribution is zero-mean; the returned norm equals ``magnitude``
    exactly.  ``magnitude = 0`` gives the zero vector.
    """
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    if magnitude < 0:
        raise ValueError("magnitude must be non-negative")
    if magnitude == 0.0:
        return np.zeros(dim)
    d = rng.normal(dim)
    nrm = float(np.linalg.norm(d))
    while nrm == 0.0:  # probability-zero guard
        d = rng.normal(dim)
        nrm = float(np.linalg.norm(d))
    return d * (magnitude / nrm)


# ---------------------------------------------------------------------------
# Oracle variants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exact:
    """The exact gradient."""


@dataclass(frozen=True)
class Absolute:
    """Error of norm exactly ``delta``, uniformly random direction."""

    delta: float

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be non-negative")


@dataclass(frozen=True)
class Relative:
    """Error of norm exactly ``alpha * ||grad f(x)||``; vanishes at optima."""

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("relative noise level alpha must lie in [0, 1]")


@dataclass(frozen=True)
class MeasuredRelative:
    """Noise proportional to the returned reading: ||g~ - grad f|| equals
    ``alpha * ||g~||`` exactly, direction uniform on the sphere.

    This is the instrument-style convention (error scales with the measured
    value, not the unknown true one).  The realized error relative to the
    true gradient is alpha / sqrt(1 - alpha^2) for orthogonal directions and
    exceeds the true gradient norm once alpha passes 1/sqrt(2), which is why
    divergence-threshold experiments use this oracle: it can actually drive
    the methods unstable inside alpha < 1.  It does NOT certify the error
    bound of :class:`Relative`.
    """

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError("measured-relative noise level must lie in [0, 1)")


@dataclass(frozen=True)
class Stochastic:
    """Zero-mean noise with norm ``u * delta``, u uniform on [0, 1]."""

    delta: float

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be non-negative")


@dataclass(frozen=True)
class MiniBatch:
    """Average of ``batch`` component gradients of a finite-sum problem.

    Components are drawn uniformly with replacement, except that a batch
    covering the whole sum short-circuits to the exact full gradient.
    """

    batch: int

    def __post_init__(self):
        if self.batch < 1:
            raise ValueError("batch size must be >= 1")


@dataclass(frozen=True)
class FiniteDifference:
    """Central-difference gradient from values known to accuracy ``delta_f``."""

    h: float
    delta_f: float = 0.0

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("finite-difference step h must be positive")
        if self.delta_f < 0:
            raise ValueError("delta_f must be non-negative")


@dataclass(frozen=True)
class ConstantBias:
    """Deterministic adversarial oracle: a fixed vector subtracted from the
    gradient.  Used by the gradient-descent drift demo."""

    bias: Vector

    def __post_init__(self):
        object.__setattr__(self, "bias", as_vector(self.bias))


GradientOracle = Union[
    Exact, Absolute, Relative, MeasuredRelative, Stochastic, MiniBatch,
    FiniteDifference, ConstantBias,
]


def delta_bound(oracle: GradientOracle) -> Optional[float]:
    """Absolute error level of the oracle, when one is defined.

    Returns 0 for the exact oracle, ``delta`` for the absolute and
    stochastic ones, and ``None`` for oracles whose error is not uniformly
    bounded by a constant.
    """
    if isinstance(oracle, Exact):
        return 0.0
    if isinstance(oracle, (Absolute, Stochastic)):
        return oracle.delta
    if isinstance(oracle, ConstantBias):
        return float(np.linalg.norm(oracle.bias))
    return None


def oracle_gradient(oracle: GradientOracle, problem: Problem, x: Vector,
                    rng: RngStream) -> Vector:
    """Inexact gradient of the smooth part of ``problem`` at ``x``."""
    x = check_dim(problem, x)
    if isinstance(oracle, Exact):
        return gradient(problem, x)
    if isinstance(oracle, Absolute):
        return gradient(problem, x) + sphere_noise(rng, problem.dim, oracle.delta)
    if isinstance(oracle, Relative):
        g = gradient(problem, x)
        return g + sphere_noise(rng, problem.dim, oracle.alpha * float(np.linalg.norm(g)))
    if isinstance(oracle, MeasuredRelative):
        g = gradient(problem, x)
        gn = float(np.linalg.norm(g))
        if gn == 0.0 or oracle.alpha == 0.0:
            return g
        xi = sphere_noise(rng, problem.dim, 1.0)
        # solve t = alpha * ||g + t xi|| for the noise magnitude t >= 0
        a2 = oracle.alpha ** 2
        s = float(np.dot(g, xi))
        t = (a2 * s + oracle.alpha * math.sqrt(a2 * s * s + (1.0 - a2) * gn * gn)) \
            / (1.0 - a2)
        return g + t * xi
    if isinstance(oracle, Stochastic):
        u = float(rng.uniform())
        return gradient(problem, x) + sphere_noise(rng, problem.dim, u * oracle.delta)
    if isinstance(oracle, MiniBatch):
        return minibatch_gradient(problem, x, oracle.batch, rng)
    if isinstance(oracle, FiniteDifference):
        return finite_difference_gradient(problem, x, oracle.h, oracle.delta_f, rng)
    if isinstance(oracle, ConstantBias):
        return gradient(problem, x) - oracle.bias
    raise TypeError(f"unknown oracle {oracle!r}")


def minibatch_gradient(problem: Problem, x: Vector, m: int, rng: RngStream) -> Vector:
    if problem.components is None:
        raise ValueError("mini-batch oracle requires a finite-sum problem")
    M = len(problem.components)
    if m < 1:
        raise ValueError("batch size must be >= 1")
    if m > M:
        raise ValueError(f"batch size {m} exceeds component count {M}")
    if m == M:  # full batch: no sampling
        return gradient(problem, x)
    idx = rng.indices(M, m)
    g = np.zeros(problem.dim)
    for i in idx:
        g += gradient(problem.components[i], x)
    return g / m


def finite_difference_gradient(problem: Problem, x: Vector, h: float,
                               delta_f: float, rng: RngStream) -> Vector:
    """Coordinate-wise central differences of noisy objective values.

    Each objective evaluation is corrupted by an independent uniform draw
    from [-delta_f, delta_f].  The per-coordinate error is bounded by
    ``delta_f / h`` plus the curvature term of the central-difference
    scheme, so the overall gradient error scales like
    ``sqrt(n) * (C * h**2 + delta_f / h)``.
    """
    if h <= 0:
        raise ValueError("finite-difference step h must be positive")
    x = check_dim(problem, x)
    n = problem.dim
    noise = rng.symmetric_uniform(delta_f, size=(n, 2)) if delta_f > 0 else np.zeros((n, 2))
    g = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        fp = float(problem.value(x + e)) + noise[i, 0]
        fm = float(problem.value(x - e)) + noise[i, 1]
        g[i] = (fp - fm) / (2.0 * h)
    return g


def minibatch_variance_estimate(problem: Problem, x: Vector, m: int,
                                trials: int, rng: RngStream) -> float:
    """Monte-Carlo estimate of E ||g_batch - grad f(x)||^2.

    With-replacement averaging makes the estimate scale as 1/m exactly in
    expectation; a full batch has zero error by construction.
    """
    if problem.components is None:
        raise ValueError("variance estimate requires a finite-sum problem")
    M = len(problem.components)
    if m < 1:
        raise ValueError("batch size must be >= 1")
    if m > M:
        raise ValueError(f"batch size {m} exceeds component count {M}")
    x = check_dim(problem, x)
    if m == M:
        return 0.0
    g_full = gradient(problem, x)
    comp = np.stack([gradient(c, x) for c in problem.components])
    idx = rng.indices(M, size=trials * m).reshape(trials, m)
    batch_means = comp[idx].mean(axis=1)
    errs = batch_means - g_full
    return float(np.mean(np.sum(errs * errs, axis=1)))
