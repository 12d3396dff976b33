"""Blocked primal-dual driver around a pluggable projection-free oracle.

The horizon is split into Q blocks of K rounds.  Within a block the
multiplier is frozen and a fresh oracle instance (warm-started at the last
iterate) runs on the penalized losses ``f_t + lam * g_t``; at each block
boundary the multiplier takes one clamped ascent step on the block's
realized constraint total.  Block sizes and step parameters are derived
from the horizon and the oracle's regret certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import Domain
from .functions import ProblemBounds
from .metrics import RoundRecord, point_hash
from .ocg import OracleMeta

FEASIBILITY_TOL = 1e-8


def _int_power(base: float, exponent: float, mode: str) -> int:
    """Ceil/floor of base**exponent, snapping to integers hit exactly.

    Float powers of exact integer relations land within 1 ulp of the
    integer (e.g. 4096**(1/3) = 15.999...998); a relative guard keeps the
    intended value.
    """
    value = float(base) ** float(exponent)
    nearest = round(value)
    if nearest >= 1 and abs(value - nearest) <= 1e-9 * max(1.0, abs(nearest)):
        return int(nearest)
    return int(math.ceil(value) if mode == "ceil" else math.floor(value))


@dataclass(frozen=True)
class BlockedParams:
    """Derived schedule: Q blocks of K rounds, ascent parameters theta/mu."""

    T: int
    Q: int
    K: int
    alpha: float
    beta: float
    theta: float
    mu: float

    def validate(self, meta: OracleMeta, bounds: ProblemBounds) -> None:
        """Assert the fields match a fresh derivation from the inputs."""
        fresh = derive_blocked_params(self.T, meta, bounds, self.beta)
        if fresh != self:
            raise AssertionError(f"parameters not reproducible: {fresh} != {self}")


def derive_blocked_params(T: int, meta: OracleMeta, bounds: ProblemBounds,
                          beta: float) -> BlockedParams:
    """Derive the blocked schedule from the horizon and oracle certificate.

    Uses Q = ceil(T^((2-2a)/(3-2a))), K = ceil(T^(1/(3-2a))),
    theta = 3 (c1 D + c2 L) T^(a/(3-2a) - beta) with the l2 gradient
    bound, and mu = 1/(theta (Q+1)) so that theta * mu * (Q+1) == 1.
    beta trades regret against violation and must lie in
    [0, (1-a)/(3-2a)].
    """
    if T < 4:
        raise ValueError("horizon T must be at least 4")
    alpha = meta.alpha
    beta_max = (1.0 - alpha) / (3.0 - 2.0 * alpha)
    if not 0.0 <= beta <= beta_max:
        raise ValueError(
            f"beta={beta} outside the admissible interval [0, {beta_max}]"
        )
    if meta.requires_smooth and not bounds.is_smooth:
        raise ValueError("smooth-only oracle configured with a non-smooth problem")

    q_blocks = _int_power(T, (2.0 - 2.0 * alpha) / (3.0 - 2.0 * alpha), "ceil")
    k_rounds = _int_power(T, 1.0 / (3.0 - 2.0 * alpha), "ceil")

    smooth_term = meta.c2 * bounds.smoothness if meta.c2 > 0.0 else 0.0
    scale = meta.c1 * bounds.grad_bound_l2 + smooth_term
    if not scale > 0.0:
        raise ValueError("oracle certificate gives a zero augmentation scale")
    theta = 3.0 * scale * float(T) ** (alpha / (3.0 - 2.0 * alpha) - beta)
    mu = 1.0 / (theta * (q_blocks + 1))
    return BlockedParams(T=T, Q=q_blocks, K=k_rounds, alpha=alpha, beta=beta,
                         theta=theta, mu=mu)


def block_dual_update(multiplier: float, g_block_sum: float, theta: float,
                      mu: float) -> float:
    """Clamped ascent step on a block's realized constraint total.

    The expression is written exactly as max(0, (1 - theta*mu)*lam +
    mu*g); tests compare it bit-for-bit against a reference.
    """
    return max(0.0, (1.0 - theta * mu) * multiplier + mu * g_block_sum)


@dataclass
class RunLog:
    """Output of a driver run: per-round records plus optional raw points.

    ``final_multiplier`` is the dual value after the last update (the
    records carry the value each decision was played under).
    """

    records: list
    points: list | None = None
    final_multiplier: float = 0.0

    @property
    def multipliers(self) -> np.ndarray:
        return np.array([rec.multiplier for rec in self.records])


def run_blocked(rounds, domain: Domain, params: BlockedParams,
                bounds: ProblemBounds, oracle_factory, rng,
                keep_points: bool = False) -> RunLog:
    """Play ``params.T`` rounds with the blocked primal-dual scheme.

    ``rounds`` must yield at least T round functions in order; the stream
    is truncated at T, so a short final block settles its dual step on the
    realized partial sum.  ``oracle_factory(domain, x0, horizon,
    grad_bound, rng)`` builds a fresh oracle per block; the per-block
    gradient bound passed down is ``grad_bound_l2 * (1 + lam)``, matching
    the penalized losses the oracle will see.  Every decision is logged
    before the round's functions are revealed to the oracle, so ``x_t``
    depends only on rounds before t.

    Raises if the stream is shorter than T or an emitted point leaves the
    domain (tolerance 1e-8).
    """
    rounds = list(rounds)
    if len(rounds) < params.T:
        raise ValueError(f"stream yields {len(rounds)} rounds, need {params.T}")
    rounds = rounds[: params.T]

    records: list[RoundRecord] = []
    points: list[np.ndarray] | None = [] if keep_points else None
    multiplier = 0.0
    x_cur = domain.canonical_point()
    t_idx = 0

    for _q in range(params.Q):
        if t_idx >= params.T:
            break
        block_len = min(params.K, params.T - t_idx)
        oracle = oracle_factory(
            domain, x_cur, block_len,
            bounds.grad_bound_l2 * (1.0 + multiplier), rng.spawn(1)[0],
        )
        g_block_sum = 0.0
        for _k in range(block_len):
            rf = rounds[t_idx]
            x_t = oracle.current()
            if not domain.contains(x_t, FEASIBILITY_TOL):
                raise RuntimeError(f"oracle emitted an infeasible point at round {rf.t}")
            f_val, f_grad = rf.f(x_t)
            g_val, g_grad = rf.g(x_t)
            records.append(RoundRecord(rf.t, float(f_val), float(g_val),
                                       multiplier, point_hash(x_t)))
            if points is not None:
                points.append(x_t)
            oracle.step(f_grad + multiplier * g_grad)
            g_block_sum += float(g_val)
            t_idx += 1
        multiplier = block_dual_update(multiplier, g_block_sum,
                                       params.theta, params.mu)
        x_cur = oracle.current()

    return RunLog(records=records, points=points, final_multiplier=multiplier)
