"""Per-round meta Frank-Wolfe with dual ascent, driven by K persistent
perturbed-leader oracles.

Each round runs a K-step Frank-Wolfe pass whose directions come from K
independent :class:`FollowPerturbedLeader` instances (oracle k supplies
the k-th inner direction of every round), then takes one clamped dual
ascent step on the realized constraint value.  Oracle k is fed, once the
round's functions are revealed, the penalized gradient evaluated at the
k-th inner iterate of the pass that produced the round's decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blocked import FEASIBILITY_TOL, RunLog, _int_power
from .domains import Domain
from .ftpl import FollowPerturbedLeader, policy_delta
from .functions import ProblemBounds, penalized_grad
from .metrics import RoundRecord, point_hash


def fw_step(k: int) -> float:
    """Inner step schedule 2 / (k + 1); the first step fully replaces x."""
    return 2.0 / (k + 1)


@dataclass(frozen=True)
class MetaFwParams:
    """Derived schedule: K inner steps, ascent parameters, perturbation density."""

    T: int
    K: int
    beta: float
    theta: float
    mu: float
    delta: float

    def validate(self, bounds: ProblemBounds) -> None:
        fresh = derive_meta_fw_params(self.T, bounds, self.beta)
        if fresh != self:
            raise AssertionError(f"parameters not reproducible: {fresh} != {self}")


def derive_meta_fw_params(T: int, bounds: ProblemBounds, beta: float) -> MetaFwParams:
    """Derive the per-round schedule from the horizon and problem bounds.

    K = floor(T^(1/2+beta)) inner steps, theta = 12 R D sqrt(d) /
    T^(1/2+beta) and mu = 1/(theta (T+2)) (so mu * theta * (T+2) == 1),
    with R the l1 diameter and D the sup-norm gradient bound; the
    perturbation density is ``policy_delta``.  beta in [0, 1/2), where 0
    is the matched-growth mode for stochastic losses under strong duality.
    """
    if T < 4:
        raise ValueError("horizon T must be at least 4")
    if not 0.0 <= beta < 0.5:
        raise ValueError(f"beta={beta} outside the admissible interval [0, 0.5)")
    if not bounds.is_smooth:
        raise ValueError("this driver requires smooth losses and constraints")

    k_steps = max(1, _int_power(T, 0.5 + beta, "floor"))
    horizon_power = float(T) ** (0.5 + beta)
    theta = 12.0 * bounds.diam_l1 * bounds.grad_bound_inf * math.sqrt(bounds.dim) \
        / horizon_power
    mu = 1.0 / (theta * (T + 2))
    delta = policy_delta(bounds.grad_bound_inf, bounds.dim, T, beta)
    return MetaFwParams(T=T, K=k_steps, beta=beta, theta=theta, mu=mu, delta=delta)


def dual_update(multiplier: float, g_val: float, theta: float, mu: float) -> float:
    """Clamped ascent step on one round's constraint value.

    Written exactly as max(0, (1 - theta*mu)*lam + mu*g) for bit-exact
    comparison against the reference expression.
    """
    return max(0.0, (1.0 - theta * mu) * multiplier + mu * g_val)


def primal_update(x_start: np.ndarray, oracles, domain: Domain):
    """One K-step Frank-Wolfe pass stepping toward each oracle's selection.

    Returns ``(x_next, inner_iterates, directions)`` where
    ``inner_iterates[k]`` is the point at which inner step k+1 started and
    ``directions[k]`` the selected vertex.  Every direction is checked
    against the domain (an infeasible selection is an oracle contract
    breach); the iterates stay feasible as convex combinations.
    """
    x = np.array(x_start, dtype=np.float64, copy=True)
    inner_iterates = []
    directions = []
    for k, oracle in enumerate(oracles, start=1):
        inner_iterates.append(x.copy())
        v = oracle.select()
        if not domain.contains(v, FEASIBILITY_TOL):
            raise RuntimeError(f"oracle {k} selected an infeasible direction")
        directions.append(v)
        x = x + fw_step(k) * (v - x)
    return x, inner_iterates, directions


def run_meta_fw(rounds, domain: Domain, params: MetaFwParams, rng,
                warm_start: bool = True, lagged_coefficients: bool = False,
                perturbation: str = "narrow",
                keep_points: bool = False) -> RunLog:
    """Play ``params.T`` rounds of meta Frank-Wolfe with dual ascent.

    Per round: log the current decision, reveal the round's functions,
    feed each oracle its penalized-gradient coefficient at the matching
    inner iterate of the pass that produced the decision, run the K-step
    pass for the next decision, and take the dual step on g_t(x_t).

    ``warm_start`` starts each pass from the previous decision (the
    alternative restarts from the initial point; both end at the same
    decision because the first inner step replaces x entirely, but the
    coefficient iterates differ).  ``lagged_coefficients`` delays each
    observation by one round, so the selection for round t+1 uses
    coefficients through round t-1 instead of t.

    ``perturbation`` picks the span of each oracle's uniform perturbation
    box: ``"narrow"`` (default) uses span ``params.delta``, which keeps
    the oracles responsive to the accumulated gradients at practical
    horizons; ``"wide"`` uses span ``1/params.delta``, the scale the
    worst-case oracle regret bound is stated at, which at desk scale
    swamps the signal and effectively freezes the selections.
    """
    rounds = list(rounds)
    if len(rounds) < params.T:
        raise ValueError(f"stream yields {len(rounds)} rounds, need {params.T}")
    rounds = rounds[: params.T]

    if perturbation not in ("narrow", "wide"):
        raise ValueError("perturbation must be 'narrow' or 'wide'")
    # FollowPerturbedLeader samples [0, 1/density]; invert the desired span.
    density = 1.0 / params.delta if perturbation == "narrow" else params.delta
    oracle_rngs = rng.spawn(params.K)
    oracles = [FollowPerturbedLeader(domain, density, child)
               for child in oracle_rngs]

    records: list[RoundRecord] = []
    points: list[np.ndarray] | None = [] if keep_points else None
    multiplier = 0.0
    x_initial = domain.canonical_point()
    x_cur = x_initial.copy()
    # Inner iterates backing the coefficients of round 1: no pass produced
    # x_1, so the initial point stands in at every inner index.
    inner_trace = [x_cur.copy() for _ in range(params.K)]
    pending: list[np.ndarray] | None = None

    for rf in rounds:
        if not domain.contains(x_cur, FEASIBILITY_TOL):
            raise RuntimeError(f"decision left the domain at round {rf.t}")
        f_val, _ = rf.f(x_cur)
        g_val, _ = rf.g(x_cur)
        records.append(RoundRecord(rf.t, float(f_val), float(g_val),
                                   multiplier, point_hash(x_cur)))
        if points is not None:
            points.append(x_cur.copy())

        coefficients = [penalized_grad(rf, multiplier, inner_trace[k])
                        for k in range(params.K)]
        if lagged_coefficients:
            if pending is not None:
                for oracle, w in zip(oracles, pending):
                    oracle.observe(w)
            pending = coefficients
        else:
            for oracle, w in zip(oracles, coefficients):
                oracle.observe(w)

        x_start = x_cur if warm_start else x_initial
        x_cur, inner_trace, _ = primal_update(x_start, oracles, domain)
        multiplier = dual_update(multiplier, float(g_val), params.theta, params.mu)

    return RunLog(records=records, points=points, final_multiplier=multiplier)
