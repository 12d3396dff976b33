"""Built-in problem generators and the offline benchmark solver.

Two problem families are shipped:

* :class:`MatrixCompletionInstance`: reconstruct a hidden matrix of unit
  nuclear norm from ``b`` entries revealed per round, over a nuclear-norm
  ball, under the long-term constraint ``sum_t <G_t, X_t> <= 0`` with
  ``G_t`` uniform on ``[-1, 1]^(m x n)`` (zero mean, so the expected
  constraint vanishes everywhere and every feasible point satisfies it).

* :class:`StochasticQuadratic`: a fully analyzable low-dimensional
  testbed on the unit box with quadratic losses around random centers and
  linear stochastic constraints.

Bound derivations (stored in :class:`ProblemBounds`) for matrix
completion over the radius-k nuclear ball, recalling that every entry of
a matrix is dominated by its spectral norm and hence by its nuclear norm:

* loss gradients live on the revealed entries with values ``X_ij - M_ij``,
  so their sup norm is at most ``k + 1`` and their l2 norm at most
  ``sqrt(b) (k + 1)``;
* the constraint gradient is ``G_t`` itself: sup norm 1, l2 norm at most
  ``sqrt(m n)``;
* ``|<G_t, X>| <= ||G_t||_inf ||X||_1 <= k sqrt(m n)`` bounds g values
  (the entrywise l1 norm of a nuclear-ball member is at most
  ``k sqrt(m n)``, attained by scaled all-ones sign patterns);
* both f and g have 1-Lipschitz gradients in every norm pairing used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .domains import Box, Domain, NuclearBall
from .functions import FirstOrder, ProblemBounds, RoundFunctions

TARGET_RANK = 5


def _round_rng(seed: int, t: int):
    # Per-round stream keyed by (seed, t); t >= 1 so the key never collides
    # with the instance-level stream at (seed, 0).
    return np.random.default_rng([seed, t])


@dataclass(frozen=True)
class MatrixCompletionInstance:
    """Online matrix completion over a nuclear-norm ball."""

    rows: int
    cols: int
    radius: float
    reveals: int
    seed: int
    target: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.rows * self.cols

    def domain(self) -> NuclearBall:
        return NuclearBall(self.radius, self.rows, self.cols)

    def bounds(self) -> ProblemBounds:
        entry_bound = self.radius + 1.0
        return ProblemBounds(
            grad_bound_l2=max(math.sqrt(self.reveals) * entry_bound,
                              math.sqrt(self.dim)),
            grad_bound_inf=entry_bound,
            smoothness=1.0,
            constraint_bound=self.radius * math.sqrt(self.dim),
            diam_l1=self.domain().diameter(),
            diam_l2=self.domain().diameter_euclidean(),
            dim=self.dim,
        )

    def round_from_payload(self, t: int, revealed_idx: np.ndarray,
                           constraint_flat: np.ndarray) -> RoundFunctions:
        """Build the round functions for given revealed indices and G matrix."""
        revealed_idx = np.ascontiguousarray(revealed_idx, dtype=np.int64)
        constraint_flat = np.ascontiguousarray(constraint_flat, dtype=np.float64)
        constraint_flat.setflags(write=False)
        m_vals = self.target.ravel()[revealed_idx].copy()
        dim = self.dim

        def f(x):
            diff = x[revealed_idx] - m_vals
            grad = np.zeros(dim)
            grad[revealed_idx] = diff
            return 0.5 * float(diff @ diff), grad

        def g(x):
            return float(constraint_flat @ x), constraint_flat

        return RoundFunctions(f=f, g=g, t=t,
                              data={"revealed_idx": revealed_idx,
                                    "constraint_flat": constraint_flat})

    def sample_round(self, t: int, rng=None) -> RoundFunctions:
        """Draw round t: a size-b index set (without replacement) and G_t.

        With no explicit ``rng`` the round is deterministic in (seed, t),
        so streams can be re-materialized and pre-sampled in parallel.
        """
        if rng is None:
            rng = _round_rng(self.seed, t)
        revealed = np.sort(rng.choice(self.dim, size=self.reveals, replace=False))
        constraint = rng.uniform(-1.0, 1.0, size=self.dim)
        return self.round_from_payload(t, revealed, constraint)

    def rounds(self, horizon: int) -> list[RoundFunctions]:
        return [self.sample_round(t) for t in range(1, horizon + 1)]

    def offline_objective(self, rounds) -> "OfflineProblem":
        """Aggregate the realized losses into an O(dim)-per-eval closure.

        The expected constraint is identically zero (G entries are
        centered), so no offline constraint is attached.
        """
        counts = np.zeros(self.dim)
        for rf in rounds:
            counts[rf.data["revealed_idx"]] += 1.0
        m_flat = self.target.ravel()

        def objective(x):
            diff = x - m_flat
            weighted = counts * diff
            return 0.5 * float(diff @ weighted), weighted

        return OfflineProblem(objective=objective, mean_constraint=None)

    def benchmark_defaults(self, horizon: int) -> tuple[int, float]:
        # Plain Frank-Wolfe reaches the (interior) offline optimum at rate
        # O(smoothness * diam^2 / iters); the budget keeps the residual gap
        # well below desk-scale regret magnitudes.
        return 60_000, 0.05


def gen_matrix_completion(m: int, n: int, k: float, b: int,
                          seed: int) -> MatrixCompletionInstance:
    """Generate an instance: random low-rank target rescaled to nuclear norm 1.

    Requires ``1 <= b <= m n`` and ``k >= 1`` (so the rescaled target is
    inside the radius-k ball).
    """
    if m < 1 or n < 1:
        raise ValueError("matrix shape must be positive")
    if not 1 <= b <= m * n:
        raise ValueError(f"reveals per round must lie in [1, {m * n}]")
    if k < 1.0:
        raise ValueError("domain radius must be at least 1")
    rng = np.random.default_rng([seed, 0])
    rank = min(TARGET_RANK, m, n)
    left = rng.standard_normal((m, rank))
    right = rng.standard_normal((n, rank))
    raw = left @ right.T
    nuclear = float(np.sum(np.linalg.svd(raw, compute_uv=False)))
    target = raw / nuclear
    target.setflags(write=False)
    return MatrixCompletionInstance(rows=m, cols=n, radius=float(k), reveals=int(b),
                                    seed=int(seed), target=target)


@dataclass(frozen=True)
class StochasticQuadratic:
    """Quadratic losses around uniform random centers on the unit box.

    Losses are ``0.5 ||x - c_t||^2`` with ``c_t ~ U[0,1]^d``; constraints
    are ``<a_t, x> + offset`` with ``a_t ~ U[-1,1]^d + direction_mean``.
    The expected constraint is ``direction_mean * sum(x) + offset``, so
    the default (0, 0) configuration is feasible everywhere.
    """

    dim: int
    seed: int
    direction_mean: float = 0.0
    offset: float = 0.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")

    def domain(self) -> Box:
        return Box.unit(self.dim)

    def bounds(self) -> ProblemBounds:
        dir_bound = 1.0 + abs(self.direction_mean)
        return ProblemBounds(
            grad_bound_l2=math.sqrt(self.dim) * dir_bound,
            grad_bound_inf=dir_bound,
            smoothness=1.0,
            constraint_bound=dir_bound * self.dim + abs(self.offset),
            diam_l1=float(self.dim),
            diam_l2=math.sqrt(self.dim),
            dim=self.dim,
        )

    def sample_round(self, t: int, rng=None) -> RoundFunctions:
        if rng is None:
            rng = _round_rng(self.seed, t)
        center = rng.uniform(0.0, 1.0, size=self.dim)
        direction = rng.uniform(-1.0, 1.0, size=self.dim) + self.direction_mean
        direction.setflags(write=False)
        offset = self.offset

        def f(x):
            diff = x - center
            return 0.5 * float(diff @ diff), diff

        def g(x):
            return float(direction @ x) + offset, direction

        return RoundFunctions(f=f, g=g, t=t,
                              data={"center": center, "direction": direction})

    def rounds(self, horizon: int) -> list[RoundFunctions]:
        return [self.sample_round(t) for t in range(1, horizon + 1)]

    def mean_constraint(self) -> FirstOrder | None:
        """Closed-form expected constraint; None when identically zero."""
        if self.direction_mean == 0.0 and self.offset == 0.0:
            return None
        mean_dir = np.full(self.dim, self.direction_mean)

        def gbar(x):
            return float(mean_dir @ x) + self.offset, mean_dir.copy()

        return gbar

    def offline_objective(self, rounds) -> "OfflineProblem":
        count = len(rounds)
        center_sum = np.zeros(self.dim)
        sq_sum = 0.0
        for rf in rounds:
            c = rf.data["center"]
            center_sum += c
            sq_sum += float(c @ c)

        def objective(x):
            value = 0.5 * (count * float(x @ x) - 2.0 * float(center_sum @ x)
                           + sq_sum)
            return value, count * x - center_sum

        return OfflineProblem(objective=objective,
                              mean_constraint=self.mean_constraint())

    def benchmark_defaults(self, horizon: int) -> tuple[int, float]:
        return 250_000, max(0.1, 1e-4 * horizon)


@dataclass(frozen=True)
class OfflineProblem:
    """Realized-sum objective plus (optional) expected-constraint oracle."""

    objective: FirstOrder
    mean_constraint: FirstOrder | None = None


@dataclass
class BenchmarkResult:
    x: np.ndarray
    gap: float
    converged: bool
    penalty: float | None
    objective_trace: np.ndarray


def _frank_wolfe(objective: FirstOrder, domain: Domain, n_iters: int,
                 tol: float, rng):
    """Frank-Wolfe with step 2/(k+1); keeps the best-value iterate seen.

    Stops early once the duality-gap certificate ``<grad, x - v>`` drops
    below ``tol``.  The returned gap is the one evaluated at the returned
    iterate; on nonsmooth surrogates (hinge penalties) the gap need not
    vanish, so selection goes by objective value.
    """
    x = domain.canonical_point()
    best_x, best_val, best_gap = x.copy(), math.inf, math.inf
    trace = []
    for k in range(1, n_iters + 1):
        value, grad = objective(x)
        trace.append(value)
        v = domain.lmo(grad, rng)
        gap = float(grad @ (x - v))
        if gap <= tol:
            # certified: value is within gap <= tol of the optimum
            return x, gap, np.array(trace)
        if value < best_val:
            best_val, best_gap, best_x = value, gap, x.copy()
        x = x + (2.0 / (k + 1)) * (v - x)
    return best_x, best_gap, np.array(trace)


def benchmark_solve(problem: OfflineProblem, domain: Domain, n_iters: int,
                    tol: float, rng, initial_penalty: float = 1.0,
                    max_penalty_doublings: int = 40) -> BenchmarkResult:
    """Offline solve for the comparator point of the regret accounting.

    With no expected-constraint oracle the realized loss sum is minimized
    directly by Frank-Wolfe.  Otherwise the hinge-penalized surrogate
    ``F + P [gbar]_+`` is solved, doubling P until the returned point
    satisfies ``gbar <= tol``.  ``converged`` reports whether both the
    duality-gap certificate and (when applicable) the feasibility target
    were met; callers propagate the flag into run summaries.
    """
    if n_iters < 1:
        raise ValueError("n_iters must be at least 1")

    if problem.mean_constraint is None:
        x, gap, trace = _frank_wolfe(problem.objective, domain, n_iters, tol, rng)
        return BenchmarkResult(x=x, gap=gap, converged=gap <= tol, penalty=None,
                               objective_trace=trace)

    gbar = problem.mean_constraint
    penalty = initial_penalty
    x, gap, trace = None, math.inf, np.array([])
    for _ in range(max_penalty_doublings + 1):

        def surrogate(x_, _p=penalty):
            value, grad = problem.objective(x_)
            c_val, c_grad = gbar(x_)
            if c_val > 0.0:
                return value + _p * c_val, grad + _p * c_grad
            return value, grad

        x, gap, trace = _frank_wolfe(surrogate, domain, n_iters, tol, rng)
        if gbar(x)[0] <= tol:
            break
        penalty *= 2.0
    feasible = gbar(x)[0] <= tol
    return BenchmarkResult(x=x, gap=gap, converged=(gap <= tol) and feasible,
                           penalty=penalty, objective_trace=trace)


PROBLEM_BUILDERS: dict[str, Callable] = {
    "matrix_completion": lambda cfg, seed: gen_matrix_completion(
        cfg["m"], cfg["n"], cfg["k"], cfg["b"], seed),
    "stochastic_quadratic": lambda cfg, seed: StochasticQuadratic(
        dim=cfg["dim"], seed=seed,
        direction_mean=cfg.get("direction_mean", 0.0),
        offset=cfg.get("offset", 0.0)),
}
