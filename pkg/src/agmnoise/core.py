"""Problem abstraction, feasible sets, and run traces shared by all solvers.

Everything here is a plain immutable value: problems, feasible sets, and
composite terms are frozen dataclasses holding callables, and a finished
:class:`Trace` is never mutated by its producer again.  That makes all of
these objects safe to share between concurrent runs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np
from numpy.typing import NDArray

Vector = NDArray[np.float64]

# Iterates beyond this radius count as divergence rather than an error:
# threshold searches deliberately drive runs past the point of no return.
DIVERGENCE_RADIUS = 1e12

# Default tolerances: relative tolerance for algebraic identity checks and
# the stationarity tolerance applied to declared minimizers.
REL_TOL = 1e-9
TOL_OPT = 1e-7


class DimensionMismatch(ValueError):
    """Raised when a vector does not match the problem dimension."""


def as_vector(x) -> Vector:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {v.shape}")
    return v


def check_dim(problem: "Problem", x: Vector) -> Vector:
    x = as_vector(x)
    if x.shape[0] != problem.dim:
        raise DimensionMismatch(
            f"vector has dimension {x.shape[0]}, problem expects {problem.dim}"
        )
    return x


def is_admissible(x: Vector) -> bool:
    """True when x is finite and inside the divergence radius."""
    return bool(np.all(np.isfinite(x))) and float(np.linalg.norm(x)) <= DIVERGENCE_RADIUS


# ---------------------------------------------------------------------------
# Feasible sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Unconstrained:
    """The whole space; projection is the identity."""


@dataclass(frozen=True)
class Ball:
    center: Vector
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")


@dataclass(frozen=True)
class Box:
    lo: Vector
    hi: Vector

    def __post_init__(self):
        object.__setattr__(self, "lo", as_vector(self.lo))
        object.__setattr__(self, "hi", as_vector(self.hi))
        if np.any(self.lo > self.hi):
            raise ValueError("box has lo > hi in some coordinate")


@dataclass(frozen=True)
class ViaProx:
    """Constraint folded into the composite prox (indicator handled there).

    Solvers never compose a projection with a prox map, since prox-after-
    projection is not in general a prox.  When both a constraint and a
    composite term are needed, the prox must already encode the set.
    """


FeasibleSet = Union[Unconstrained, Ball, Box, ViaProx]


def project(feasible: FeasibleSet, v: Vector) -> Vector:
    """Euclidean projection of ``v`` onto the feasible set."""
    v = as_vector(v)
    if isinstance(feasible, Unconstrained):
        return v
    if isinstance(feasible, Ball):
        d = v - feasible.center
        nrm = float(np.linalg.norm(d))
        if nrm <= feasible.radius:
            return v
        return feasible.center + d * (feasible.radius / nrm)
    if isinstance(feasible, Box):
        return np.clip(v, feasible.lo, feasible.hi)
    if isinstance(feasible, ViaProx):
        # Feasibility is maintained by the composite prox, not by projection.
        return v
    raise TypeError(f"unknown feasible set {feasible!r}")


# ---------------------------------------------------------------------------
# Problems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompositeTerm:
    """A convex, prox-friendly term r added to the smooth objective.

    ``value(x)`` evaluates r(x); ``prox(v, t)`` returns
    argmin_u { t*r(u) + 0.5*||u - v||^2 }, restricted to the feasible set
    when the term also encodes a constraint.
    """

    value: Callable[[Vector], float]
    prox: Callable[[Vector, float], Vector]


@dataclass(frozen=True)
class Problem:
    """A smooth objective with optional composite term and feasible set.

    ``value`` and ``grad`` refer to the smooth component; when a composite
    term is present the full objective is ``value(x) + composite.value(x)``
    and :func:`evaluate` returns that sum.  ``lips`` is the gradient
    Lipschitz constant of the smooth part and ``mu`` its strong convexity
    modulus (``mu = 0`` means plain convexity).  ``known_min`` and
    ``known_argmin`` refer to the full objective when supplied.
    """

    dim: int
    value: Callable[[Vector], float]
    grad: Callable[[Vector], Vector]
    lips: float
    mu: float = 0.0
    known_min: Optional[float] = None
    known_argmin: Optional[Vector] = None
    composite: Optional[CompositeTerm] = None
    feasible: FeasibleSet = field(default_factory=Unconstrained)
    components: Optional[tuple] = None  # finite-sum structure, if any

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("problem dimension must be >= 1")
        if self.lips <= 0:
            raise ValueError("Lipschitz constant must be positive")
        if self.mu < 0 or self.mu > self.lips:
            raise ValueError("strong convexity modulus must satisfy 0 <= mu <= lips")
        if self.known_argmin is not None:
            object.__setattr__(self, "known_argmin", as_vector(self.known_argmin))
        if isinstance(self.feasible, ViaProx) and self.composite is None:
            raise ValueError("ViaProx feasible set requires a composite term")


def evaluate(problem: Problem, x: Vector) -> float:
    """Full objective value at x (smooth part plus composite term, if any).

    A non-finite result is returned as-is; callers treat it as a divergence
    signal rather than an error.
    """
    x = check_dim(problem, x)
    val = float(problem.value(x))
    if problem.composite is not None:
        val += float(problem.composite.value(x))
    return val


def smooth_value(problem: Problem, x: Vector) -> float:
    """Smooth component only (the full objective minus the composite term)."""
    x = check_dim(problem, x)
    return float(problem.value(x))


def gradient(problem: Problem, x: Vector) -> Vector:
    """Exact gradient of the smooth component."""
    x = check_dim(problem, x)
    return as_vector(problem.grad(x))


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------

TRACE_HEADER = (
    "iter",
    "f_gap",
    "grad_norm",
    "dist_to_opt",
    "A_k",
    "alpha_k",
    "r_tilde_k",
    "bound",
    "stopped",
)

STATUS_OK = "ok"
STATUS_STOPPED = "stopped"
STATUS_DIVERGED = "diverged"


@dataclass
class Trace:
    """Per-iteration record of a solver run.

    One row per recorded iteration, including the initialization row.
    ``f_gap``, ``dist_to_opt`` and ``r_tilde`` are ``None`` when the optimal
    value or minimizer is unknown; ``bound`` is filled by overlay writers,
    not by solvers.  When the minimizer is unknown, ``dist_to_opt`` falls
    back to the distance to the best objective value seen so far and bound
    overlays are unavailable.
    """

    k: list = field(default_factory=list)
    f: list = field(default_factory=list)
    f_gap: list = field(default_factory=list)
    grad_norm: list = field(default_factory=list)
    dist_to_opt: list = field(default_factory=list)
    A: list = field(default_factory=list)
    alpha: list = field(default_factory=list)
    r_tilde: list = field(default_factory=list)
    bound: list = field(default_factory=list)
    stopped: list = field(default_factory=list)
    status: str = STATUS_OK
    x_final: Optional[Vector] = None
    iterates: Optional[list] = None

    def append(self, k, f_val, f_gap, grad_norm, dist, A, alpha, r_tilde,
               bound=None, stopped=False):
        if self.k and k <= self.k[-1]:
            raise ValueError("iteration counter must be strictly increasing")
        self.k.append(int(k))
        self.f.append(f_val)
        self.f_gap.append(f_gap)
        self.grad_norm.append(grad_norm)
        self.dist_to_opt.append(dist)
        self.A.append(A)
        self.alpha.append(alpha)
        self.r_tilde.append(r_tilde)
        self.bound.append(bound)
        self.stopped.append(bool(stopped))

    def __len__(self):
        return len(self.k)

    @property
    def final_gap(self) -> Optional[float]:
        return self.f_gap[-1] if self.f_gap and self.f_gap[-1] is not None else None

    @property
    def min_gap(self) -> Optional[float]:
        gaps = [g for g in self.f_gap if g is not None]
        return min(gaps) if gaps else None

    def gaps(self) -> np.ndarray:
        return np.array([np.nan if g is None else g for g in self.f_gap])

    def write_csv(self, path) -> Path:
        """Write the trace with one row per iteration.

        Floats are rendered with ``repr`` (shortest round-trip form), so a
        re-run with identical inputs produces a byte-identical file.
        Missing quantities become empty fields.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_HEADER)
            for i in range(len(self.k)):
                writer.writerow([
                    self.k[i],
                    _cell(self.f_gap[i]),
                    _cell(self.grad_norm[i]),
                    _cell(self.dist_to_opt[i]),
                    _cell(self.A[i]),
                    _cell(self.alpha[i]),
                    _cell(self.r_tilde[i]),
                    _cell(self.bound[i]),
                    int(self.stopped[i]),
                ])
        return path


def _cell(v) -> str:
    if v is None:
        return ""
    return repr(float(v))


class MetricTracker:
    """Tracks gap, distance, and running-max-radius columns for a trace.

    The running radius is the maximum distance of every iterate family seen
    so far to the known minimizer.  Without a known minimizer it degrades to
    distances from the best-seen iterate, and bound overlays are flagged
    unavailable by leaving the radius column empty.
    """

    def __init__(self, problem: Problem):
        self.problem = problem
        self.fstar = problem.known_min
        self.xstar = problem.known_argmin
        self.r_tilde = 0.0
        self._best_f = np.inf
        self._best_x: Optional[Vector] = None

    def observe_points(self, *points: Vector) -> Optional[float]:
        """Fold iterate-family points into the running radius; returns it."""
        if self.xstar is None:
            return None
        for p in points:
            self.r_tilde = max(self.r_tilde, float(np.linalg.norm(p - self.xstar)))
        return self.r_tilde

    def row(self, x: Vector) -> tuple:
        """(f, f_gap, grad_norm, dist) metrics for the iterate ``x``."""
        f_val = evaluate(self.problem, x)
        gap = f_val - self.fstar if self.fstar is not None else None
        gnorm = float(np.linalg.norm(gradient(self.problem, x)))
        if self.xstar is not None:
            dist = float(np.linalg.norm(x - self.xstar))
        else:
            if f_val < self._best_f:
                self._best_f, self._best_x = f_val, x.copy()
            dist = float(np.linalg.norm(x - self._best_x))
        return f_val, gap, gnorm, dist
