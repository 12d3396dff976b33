"""Follow-The-Perturbed-Leader over a linear-minimization domain.

One uniform perturbation vector is drawn at construction from
``[0, 1/delta]^d`` and added to the running sum of observed linear
coefficients; each selection is a single LMO call on that perturbed sum.
With ``delta = 1 / (2 D sqrt(d) T^(1/2 + beta))`` (``policy_delta``) the
expected regret against the best fixed point is bounded by
``R/delta + delta d R sum_t ||w_t||_inf^2`` over the l1 diameter R.
"""

from __future__ import annotations

import numpy as np

from .domains import Domain, _as_vector


def policy_delta(grad_bound_inf: float, dim: int, horizon: int, beta: float) -> float:
    """Perturbation density 1 / (2 D sqrt(d) T^(1/2+beta)) for a horizon-T run."""
    if grad_bound_inf <= 0.0 or dim < 1 or horizon < 1:
        raise ValueError("need positive gradient bound, dim and horizon")
    if beta < 0.0:
        raise ValueError("beta must be nonnegative")
    return 1.0 / (2.0 * grad_bound_inf * np.sqrt(dim) * horizon ** (0.5 + beta))


class FollowPerturbedLeader:
    """One projection-free online linear optimization oracle.

    Parameters
    ----------
    domain : Domain
        Decision set providing the LMO.
    delta : float
        Perturbation density; the perturbation is uniform on
        ``[0, 1/delta]^d`` and sampled exactly once.
    rng : numpy Generator
        Owns both the perturbation draw and any LMO-internal randomness.
    """

    def __init__(self, domain: Domain, delta: float, rng):
        if delta <= 0.0:
            raise ValueError("delta must be positive")
        self.domain = domain
        self.delta = float(delta)
        self._rng = rng
        self.perturbation = rng.uniform(0.0, 1.0 / self.delta, size=domain.dim)
        self.accumulated = np.zeros(domain.dim)

    def select(self) -> np.ndarray:
        """Return the perturbed leader: lmo(perturbation + accumulated)."""
        return self.domain.lmo(self.perturbation + self.accumulated, self._rng)

    def observe(self, w) -> None:
        """Fold a revealed linear coefficient into the running sum."""
        w = _as_vector(w, self.domain.dim)
        if not np.isfinite(w).all():
            raise ValueError("non-finite coefficient vector")
        self.accumulated += w
