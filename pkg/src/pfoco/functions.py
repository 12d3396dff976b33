"""Per-round loss/constraint functions, penalized objectives, and the
augmented Lagrangian used by the primal-dual drivers.

A round is a pair of first-order oracles: ``f(x) -> (value, gradient)``
for the loss and ``g(x) -> (value, gradient)`` for the constraint, both
defined on flat float64 vectors.  The drivers only ever consume values of
g and gradients of f and g, so this is the minimal contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

FirstOrder = Callable[[np.ndarray], tuple[float, np.ndarray]]

#: Smoothness sentinel for non-smooth problems (the 0 * inf convention is
#: handled explicitly wherever a c2 * L product appears).
NON_SMOOTH = math.inf


@dataclass(frozen=True)
class RoundFunctions:
    """Loss and constraint oracles revealed at round ``t`` (1-based).

    ``data`` optionally carries problem-specific payload (e.g. the revealed
    index set and constraint matrix of a matrix-completion round) used by
    tape export and offline aggregation; the solvers never touch it.
    """

    f: FirstOrder
    g: FirstOrder
    t: int
    data: Any = None


@dataclass(frozen=True)
class ProblemBounds:
    """Problem constants consumed by the parameter derivations.

    grad_bound_l2 / grad_bound_inf bound the loss and constraint gradients
    in l2 and in sup norm; the blocked driver reads the l2 variant while
    the per-round Frank-Wolfe driver reads the sup-norm variant (paired
    with the l1 diameter).  ``smoothness`` is the gradient Lipschitz
    constant, ``NON_SMOOTH`` (inf) when unavailable.  ``constraint_bound``
    dominates g values, ``diam_l1``/``diam_l2`` are domain diameters and
    ``dim`` is the ambient dimension.
    """

    grad_bound_l2: float
    grad_bound_inf: float
    smoothness: float
    constraint_bound: float
    diam_l1: float
    diam_l2: float
    dim: int

    def __post_init__(self):
        for name in ("grad_bound_l2", "grad_bound_inf", "constraint_bound",
                     "diam_l1", "diam_l2"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if not self.smoothness > 0.0:
            raise ValueError("smoothness must be positive (inf for non-smooth)")
        if self.dim < 1:
            raise ValueError("dim must be at least 1")

    @property
    def is_smooth(self) -> bool:
        return math.isfinite(self.smoothness)


@dataclass(frozen=True)
class DualState:
    """A nonnegative multiplier with its ascent parameters.

    ``theta`` weighs the quadratic damping term of the augmented
    Lagrangian, ``mu`` is the ascent step size.  ``step(g_total)`` applies
    the clamped update ``max(0, (1 - theta mu) lam + mu g_total)``.
    """

    multiplier: float
    theta: float
    mu: float

    def __post_init__(self):
        if self.multiplier < 0.0:
            raise ValueError("multiplier must be nonnegative")
        if self.theta <= 0.0 or self.mu <= 0.0:
            raise ValueError("theta and mu must be positive")

    def step(self, g_total: float) -> "DualState":
        new = max(0.0, (1.0 - self.theta * self.mu) * self.multiplier
                  + self.mu * g_total)
        return DualState(new, self.theta, self.mu)


def penalized_grad(rf: RoundFunctions, multiplier: float, x: np.ndarray) -> np.ndarray:
    """Gradient of the penalized loss f + multiplier * g at ``x``."""
    if multiplier < 0.0:
        raise ValueError("multiplier must be nonnegative")
    _, f_grad = rf.f(x)
    _, g_grad = rf.g(x)
    grad = f_grad + multiplier * g_grad
    if not np.isfinite(grad).all():
        raise ValueError(f"non-finite penalized gradient at round {rf.t}")
    return grad


def aug_lagrangian_value(rf: RoundFunctions, x: np.ndarray, multiplier: float,
                         theta: float, k_scale: float = 1.0) -> float:
    """Augmented Lagrangian f(x) + lam g(x) - theta lam^2 / (2 k_scale).

    ``k_scale`` is 1 for the per-round form and the block length for the
    blocked form (the damping is spread across the block's rounds).
    """
    if multiplier < 0.0:
        raise ValueError("multiplier must be nonnegative")
    if k_scale < 1.0:
        raise ValueError("k_scale must be at least 1")
    f_val, _ = rf.f(x)
    g_val, _ = rf.g(x)
    return f_val + multiplier * g_val - theta * multiplier ** 2 / (2.0 * k_scale)


def dual_grad(g_val: float, multiplier: float, theta: float,
              k_scale: float = 1.0) -> float:
    """Ascent direction for the multiplier: g(x) - (theta / k_scale) lam."""
    return g_val - (theta / k_scale) * multiplier
