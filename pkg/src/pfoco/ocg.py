"""Online conditional gradient and the oracle certificate it advertises.

An oracle usable inside the blocked driver is any object exposing
``meta`` (an :class:`OracleMeta` certificate), ``current()`` (the point to
play next) and ``step(grad)`` (fold in the penalized gradient observed at
the point last played).  The certificate promises expected regret at most
``(c0 + c1 D + c2 L) K^alpha`` over any K rounds of D-Lipschitz,
L-smooth convex losses; c2 > 0 marks oracles that need smoothness.

The built-in oracle is online conditional gradient (OCG): one LMO call
per round on the gradient sum regularized toward the start point, with
the classic ``min(1, 2/sqrt(t))`` mixing step.  Its certificate is
``alpha = 3/4``, ``c0 = c2 = 0`` and ``c1`` proportional to the
euclidean diameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import Domain, _as_vector
from .functions import FirstOrder


@dataclass(frozen=True)
class OracleMeta:
    """Regret certificate (alpha, c0, c1, c2) of a block oracle."""

    alpha: float
    c0: float
    c1: float
    c2: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if min(self.c0, self.c1, self.c2) < 0.0:
            raise ValueError("certificate constants must be nonnegative")

    @property
    def requires_smooth(self) -> bool:
        return self.c2 > 0.0


class OnlineConditionalGradient:
    """Projection-free no-constraint online learner (the default oracle).

    Each ``step`` adds the observed gradient to a running sum, takes one
    LMO call on ``eta * grad_sum + 2 (x - x0)`` (follow-the-regularized-
    leader direction anchored at the start point) and mixes the returned
    vertex in with step ``min(1, 2/sqrt(t))``.  All iterates stay feasible
    because updates are convex combinations of feasible points.
    """

    def __init__(self, domain: Domain, x0, horizon: int, grad_bound: float, rng):
        if horizon < 1:
            raise ValueError("horizon must be at least 1")
        if grad_bound <= 0.0:
            raise ValueError("grad_bound must be positive")
        x0 = _as_vector(x0, domain.dim)
        if not domain.contains(x0, 1e-8):
            raise ValueError("start point lies outside the domain")
        self.domain = domain
        self.x0 = x0.copy()
        self.eta = domain.diameter_euclidean() / (2.0 * grad_bound * horizon ** 0.75)
        self._rng = rng
        self._x = x0.copy()
        self._grad_sum = np.zeros(domain.dim)
        self._t = 1

    @staticmethod
    def meta_for(domain: Domain) -> OracleMeta:
        return OracleMeta(alpha=0.75, c0=0.0, c1=2.0 * domain.diameter_euclidean(),
                          c2=0.0)

    def current(self) -> np.ndarray:
        return self._x.copy()

    def step(self, grad) -> np.ndarray:
        """Fold in the gradient observed at the current point; returns the next."""
        grad = _as_vector(grad, self.domain.dim)
        if not np.isfinite(grad).all():
            raise ValueError("non-finite gradient")
        self._grad_sum += grad
        direction = self.eta * self._grad_sum + 2.0 * (self._x - self.x0)
        v = self.domain.lmo(direction, self._rng)
        mix = min(1.0, 2.0 / math.sqrt(self._t))
        self._x = self._x + mix * (v - self._x)
        self._t += 1
        return self._x.copy()


def ocg_factory(domain: Domain):
    """(meta, factory) pair wiring OCG into the blocked driver."""

    def make(dom: Domain, x0, horizon: int, grad_bound: float, rng):
        return OnlineConditionalGradient(dom, x0, horizon, grad_bound, rng)

    return OnlineConditionalGradient.meta_for(domain), make


def regret_audit(history: list[tuple[FirstOrder, np.ndarray]], domain: Domain,
                 rng, n_samples: int = 100_000, polish_iters: int = 500) -> float:
    """Realized regret of a played block against the best fixed point found.

    ``history`` holds ``(h, x)`` pairs: the revealed first-order loss of the
    round and the point that was played.  The comparator is the best of
    ``n_samples`` random feasible points, the domain's canonical point, the
    played points themselves, and a Frank-Wolfe polish started from the
    best candidate.  Testing tool: cost grows as n_samples * len(history).
    """
    if not history:
        raise ValueError("empty history")

    def total_value(x):
        return sum(h(x)[0] for h, _ in history)

    def total_grad(x):
        g = np.zeros(domain.dim)
        for h, _ in history:
            g += h(x)[1]
        return g

    realized = sum(h(x)[0] for h, x in history)

    best_x = domain.canonical_point()
    best_val = total_value(best_x)
    for _ in range(n_samples):
        cand = domain.sample(rng)
        val = total_value(cand)
        if val < best_val:
            best_val, best_x = val, cand
    for _, x in history:
        val = total_value(x)
        if val < best_val:
            best_val, best_x = val, x.copy()

    x = np.array(best_x, dtype=np.float64, copy=True)
    fx = best_val
    for k in range(1, polish_iters + 1):
        v = domain.lmo(total_grad(x), rng)
        x = x + (2.0 / (k + 1)) * (v - x)
        fx = total_value(x)
        if fx < best_val:
            best_val = fx
    return realized - best_val
