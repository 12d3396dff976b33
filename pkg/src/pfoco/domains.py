"""Compact convex domains with linear minimization oracles (LMOs).

Every decision set used by the solvers is represented here as a ``Domain``
whose primitive is a linear minimization oracle rather than a projection:
``lmo(w)`` returns an extreme point minimizing ``<w, v>`` over the set.
Points are flat float64 vectors; matrix-shaped domains (the nuclear-norm
ball) carry their own (rows, cols) and reshape internally.  ``Point`` is
the validated boundary wrapper for user-facing code.

Supported sets: axis-aligned boxes, l1 balls, the probability simplex,
and nuclear-norm balls.  The nuclear-ball LMO is a top-singular-pair
computation done by alternating power iteration (compiled kernel when
available); the returned atom ``-radius * u v^T`` is an extreme point of
the ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import box_lmo, l1_ball_lmo, simplex_lmo, top_singular_pair

# Below this l2 norm a linear objective is treated as zero and the LMO
# returns the domain's canonical point, keeping runs reproducible.
ZERO_OBJECTIVE_NORM = 1e-12


class NullMatrixError(ValueError):
    """Raised by power_iteration when the input is numerically zero."""


@dataclass(frozen=True)
class Point:
    """A decision point: flat float64 data plus optional matrix shape.

    ``shape``, when given, is (rows, cols) with rows * cols == len(data).
    """

    data: np.ndarray
    shape: tuple[int, int] | None = None

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        if data.ndim != 1:
            raise ValueError("point data must be one-dimensional")
        if not np.isfinite(data).all():
            raise ValueError("point contains non-finite entries")
        if self.shape is not None:
            rows, cols = self.shape
            if rows * cols != data.shape[0]:
                raise ValueError(
                    f"shape {self.shape} incompatible with length {data.shape[0]}"
                )
        object.__setattr__(self, "data", data)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def as_matrix(self) -> np.ndarray:
        if self.shape is None:
            raise ValueError("point carries no matrix shape")
        return self.data.reshape(self.shape)


def _as_vector(x, dim: int) -> np.ndarray:
    """Coerce a Point or array_like to a flat float64 vector of length dim."""
    if isinstance(x, Point):
        x = x.data
    vec = np.ascontiguousarray(x, dtype=np.float64).ravel()
    if vec.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {vec.shape[0]}")
    return vec


def _check_finite(w: np.ndarray, what: str = "objective"):
    if not np.isfinite(w).all():
        raise ValueError(f"non-finite {what} vector")


class Domain:
    """Base class: a compact convex set with an LMO.

    Subclasses set ``kind`` and ``dim`` and implement ``_lmo``,
    ``contains``, ``diameter`` (the l1 diameter used by the dual-step and
    perturbation formulas), ``diameter_euclidean``, ``canonical_point``
    and ``sample``.
    """

    kind: str = "abstract"
    dim: int = 0

    def lmo(self, w, rng=None) -> np.ndarray:
        """Return argmin over the domain of <w, v>.

        ``rng`` is consumed only where the oracle itself is randomized
        (power-iteration start vectors); coordinate-wise rules ignore it.
        Near-zero ``w`` (l2 norm below 1e-12) returns the canonical point.
        """
        w = _as_vector(w, self.dim)
        _check_finite(w)
        if float(np.linalg.norm(w)) < ZERO_OBJECTIVE_NORM:
            return self.canonical_point()
        return self._lmo(w, rng)

    def _lmo(self, w: np.ndarray, rng) -> np.ndarray:
        raise NotImplementedError

    def contains(self, x, tol: float = 1e-9) -> bool:
        raise NotImplementedError

    def diameter(self) -> float:
        raise NotImplementedError

    def diameter_euclidean(self) -> float:
        raise NotImplementedError

    def canonical_point(self) -> np.ndarray:
        raise NotImplementedError

    def sample(self, rng) -> np.ndarray:
        """Draw a feasible point with full support (not necessarily uniform)."""
        raise NotImplementedError


class Box(Domain):
    kind = "box"

    def __init__(self, lo, hi):
        lo = np.ascontiguousarray(lo, dtype=np.float64)
        hi = np.ascontiguousarray(hi, dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("box bounds must be matching 1-d arrays")
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise ValueError("box bounds must be finite")
        if np.any(lo > hi):
            raise ValueError("box requires lo <= hi coordinatewise")
        if float(np.sum(hi - lo)) <= 0.0:
            raise ValueError("box is degenerate (zero diameter)")
        self.lo = lo
        self.hi = hi
        self.dim = lo.shape[0]

    @classmethod
    def unit(cls, dim: int) -> "Box":
        return cls(np.zeros(dim), np.ones(dim))

    def _lmo(self, w, rng):
        return np.asarray(box_lmo(w, self.lo, self.hi))

    def contains(self, x, tol=1e-9):
        x = _as_vector(x, self.dim)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def diameter(self):
        return float(np.sum(self.hi - self.lo))

    def diameter_euclidean(self):
        return float(np.linalg.norm(self.hi - self.lo))

    def canonical_point(self):
        return self.lo.copy()

    def sample(self, rng):
        return rng.uniform(self.lo, self.hi)


class L1Ball(Domain):
    kind = "l1_ball"

    def __init__(self, radius: float, dim: int):
        if radius <= 0.0:
            raise ValueError("l1 ball radius must be positive")
        if dim < 1:
            raise ValueError("dimension must be at least 1")
        self.radius = float(radius)
        self.dim = int(dim)

    def _lmo(self, w, rng):
        return np.asarray(l1_ball_lmo(w, self.radius))

    def contains(self, x, tol=1e-9):
        x = _as_vector(x, self.dim)
        return bool(np.sum(np.abs(x)) <= self.radius + tol)

    def diameter(self):
        return 2.0 * self.radius

    def diameter_euclidean(self):
        return 2.0 * self.radius

    def canonical_point(self):
        return np.zeros(self.dim)

    def sample(self, rng):
        # Uniform: Dirichlet magnitudes, random signs, radial cdf u^(1/d).
        mags = rng.dirichlet(np.ones(self.dim))
        signs = rng.choice([-1.0, 1.0], size=self.dim)
        scale = self.radius * rng.uniform() ** (1.0 / self.dim)
        return scale * signs * mags


class Simplex(Domain):
    kind = "simplex"

    def __init__(self, dim: int):
        if dim < 2:
            raise ValueError("simplex needs dimension at least 2")
        self.dim = int(dim)

    def _lmo(self, w, rng):
        return np.asarray(simplex_lmo(w))

    def contains(self, x, tol=1e-9):
        x = _as_vector(x, self.dim)
        return bool(np.all(x >= -tol) and abs(float(np.sum(x)) - 1.0) <= tol)

    def diameter(self):
        # l1 distance between two vertices
        return 2.0

    def diameter_euclidean(self):
        return math.sqrt(2.0)

    def canonical_point(self):
        e = np.zeros(self.dim)
        e[0] = 1.0
        return e

    def sample(self, rng):
        return rng.dirichlet(np.ones(self.dim))


class NuclearBall(Domain):
    """Matrices of bounded nuclear norm, flattened row-major to vectors."""

    kind = "nuclear_ball"

    # LMO iteration budget: generous cap with a tight stall tolerance so the
    # returned atom meets the 1e-6-relative optimality contract even on
    # small-spectral-gap inputs; typical exits are a few dozen sweeps.
    _LMO_TOL = 1e-12
    _LMO_MAX_ITERS = 5000

    def __init__(self, radius: float, rows: int, cols: int):
        if radius <= 0.0:
            raise ValueError("nuclear ball radius must be positive")
        if rows < 1 or cols < 1:
            raise ValueError("matrix shape must be positive")
        self.radius = float(radius)
        self.rows = int(rows)
        self.cols = int(cols)
        self.dim = self.rows * self.cols

    @property
    def mat_shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def _lmo(self, w, rng):
        if rng is None:
            raise ValueError("nuclear-ball LMO needs an rng for its start vector")
        mat = w.reshape(self.rows, self.cols)
        try:
            u, v, _sigma = power_iteration(
                mat, max_iters=self._LMO_MAX_ITERS, tol=self._LMO_TOL, rng=rng
            )
        except NullMatrixError:
            return np.zeros(self.dim)
        return (-self.radius) * np.outer(u, v).ravel()

    def contains(self, x, tol=1e-9):
        x = _as_vector(x, self.dim)
        sv = np.linalg.svd(x.reshape(self.rows, self.cols), compute_uv=False)
        return bool(float(np.sum(sv)) <= self.radius + tol)

    def diameter(self):
        return 2.0 * self.radius * math.sqrt(min(self.rows, self.cols))

    def diameter_euclidean(self):
        # Frobenius norm is dominated by the nuclear norm; rank-1 atoms attain it.
        return 2.0 * self.radius

    def canonical_point(self):
        return np.zeros(self.dim)

    def sample(self, rng):
        # Random convex mixture of rank-1 extreme points, shrunk by a random
        # factor: feasible and full-support, not uniform.
        n_atoms = 1 + int(rng.integers(0, 4))
        weights = rng.dirichlet(np.ones(n_atoms))
        out = np.zeros(self.dim)
        for w_atom in weights:
            u = rng.standard_normal(self.rows)
            u /= np.linalg.norm(u)
            v = rng.standard_normal(self.cols)
            v /= np.linalg.norm(v)
            sign = -1.0 if rng.uniform() < 0.5 else 1.0
            out += w_atom * sign * self.radius * np.outer(u, v).ravel()
        return float(rng.uniform()) * out


def default_power_iters(rows: int, cols: int) -> int:
    """Default sweep budget for power_iteration: 1 + ceil(10 ln max(m, n))."""
    return 1 + math.ceil(10.0 * math.log(max(rows, cols)))


def power_iteration(mat, max_iters: int | None = None, tol: float = 1e-9, rng=None):
    """Approximate the top singular pair of ``mat`` by power iteration.

    Parameters
    ----------
    mat : (m, n) array_like
        Matrix to factor; must be finite.
    max_iters : int, optional
        Sweep budget; defaults to ``default_power_iters(m, n)``.
    tol : float, optional
        Relative stall tolerance on the singular-value estimate.
    rng : numpy Generator
        Source of the random unit start vector (required).

    Returns
    -------
    (u, v, sigma) with ``mat @ v == sigma * u`` exactly (by construction)
    and sigma >= 0.

    Raises
    ------
    NullMatrixError
        If ``||mat||_F < 1e-12``; callers treat the zero matrix as the
        optimum in that case.
    """
    mat = np.ascontiguousarray(mat, dtype=np.float64)
    if mat.ndim != 2:
        raise ValueError("power iteration expects a 2-d matrix")
    _check_finite(mat.ravel(), "matrix")
    if max_iters is None:
        max_iters = default_power_iters(*mat.shape)
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    if rng is None:
        raise ValueError("power_iteration needs an rng for its start vector")
    if float(np.linalg.norm(mat)) < 1e-12:
        raise NullMatrixError("matrix is numerically zero")

    u = v = None
    sigma = 0.0
    for _attempt in range(3):
        v0 = rng.standard_normal(mat.shape[1])
        u, v, sigma, _iters, _conv = top_singular_pair(mat, v0, int(max_iters), tol)
        if sigma > 0.0:
            break
    return np.asarray(u), np.asarray(v), float(sigma)


DOMAIN_KINDS = {
    "box": Box,
    "l1_ball": L1Ball,
    "simplex": Simplex,
    "nuclear_ball": NuclearBall,
}
