"""Executable acceptance criteria.

Each criterion is a function returning a :class:`CriterionResult`; the
``verify`` CLI subcommand and ``tests/test_acceptance.py`` both drive
them, so there is a single source of truth for thresholds.  The two
growth-rate criteria share their sweeps through a lazily populated
:class:`AcceptanceContext` that also retains every played decision for
the feasibility sweep.
"""

from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass

import numpy as np

from .blocked import block_dual_update, derive_blocked_params
from .domains import Box, L1Ball, NuclearBall, Simplex
from .ftpl import FollowPerturbedLeader, policy_delta
from .functions import ProblemBounds
from .harness import execute_cell, run_single
from .meta_fw import derive_meta_fw_params, dual_update, fw_step
from .metrics import prepare_metric, slope_fit
from .ocg import OracleMeta

FEASIBILITY_TOL = 1e-8

META_FW_PROBLEM = {"name": "matrix_completion", "m": 20, "n": 20, "k": 2.0,
                   "b": 40}
META_FW_HORIZONS = (64, 128, 256, 512)
META_FW_BETA = 0.1
BLOCKED_PROBLEM = {"name": "stochastic_quadratic", "dim": 8}
BLOCKED_HORIZONS = (256, 1024, 4096)
BLOCKED_BETA = 0.0
N_SEEDS = 10


@dataclass
class CriterionResult:
    name: str
    passed: bool
    detail: str
    seconds: float


class AcceptanceContext:
    """Caches the shared growth-rate sweeps (decisions retained)."""

    def __init__(self):
        self._meta_fw = None
        self._blocked = None

    def meta_fw_cells(self):
        if self._meta_fw is None:
            self._meta_fw = {
                (horizon, seed): execute_cell(META_FW_PROBLEM, "meta-fw", horizon,
                                              META_FW_BETA, seed,
                                              keep_points=True)
                for horizon in META_FW_HORIZONS
                for seed in range(N_SEEDS)
            }
        return self._meta_fw

    def blocked_cells(self):
        if self._blocked is None:
            self._blocked = {
                (horizon, seed): execute_cell(BLOCKED_PROBLEM, "blocked", horizon,
                                              BLOCKED_BETA, seed,
                                              keep_points=True)
                for horizon in BLOCKED_HORIZONS
                for seed in range(N_SEEDS)
            }
        return self._blocked


def _result(name, passed, detail, start) -> CriterionResult:
    return CriterionResult(name, bool(passed), detail,
                           time.perf_counter() - start)


def lmo_correctness(ctx) -> CriterionResult:
    """Nuclear LMO matches a dense-SVD optimum; vertex LMOs beat samples."""
    start = time.perf_counter()
    rng = np.random.default_rng(20240801)
    radius = 3.0
    domain = NuclearBall(radius, 8, 8)
    worst_rel = 0.0
    for _ in range(100):
        w_mat = rng.standard_normal((8, 8))
        atom = domain.lmo(w_mat.ravel(), rng)
        if not domain.contains(atom, FEASIBILITY_TOL):
            return _result("lmo_correctness", False,
                           "nuclear LMO emitted an infeasible atom", start)
        achieved = float(w_mat.ravel() @ atom)
        sigma_max = float(np.linalg.svd(w_mat, compute_uv=False)[0])
        expected = -radius * sigma_max
        worst_rel = max(worst_rel, abs(achieved - expected) / abs(expected))
    if worst_rel > 1e-6:
        return _result("lmo_correctness", False,
                       f"nuclear LMO off by {worst_rel:.3e} relative", start)

    domains = [Box(np.full(6, -1.0), np.full(6, 2.0)), L1Ball(1.5, 6), Simplex(6)]
    for dom in domains:
        for _ in range(20):
            w = rng.standard_normal(dom.dim)
            chosen = dom.lmo(w, rng)
            if not dom.contains(chosen, FEASIBILITY_TOL):
                return _result("lmo_correctness", False,
                               f"{dom.kind} LMO emitted an infeasible point",
                               start)
            samples = np.array([dom.sample(rng) for _ in range(1000)])
            best_sample = float(np.min(samples @ w))
            if float(w @ chosen) > best_sample + 1e-9:
                return _result("lmo_correctness", False,
                               f"{dom.kind} LMO beaten by a random sample",
                               start)
    elapsed = time.perf_counter() - start
    return _result("lmo_correctness", elapsed < 10.0,
                   f"worst nuclear relative error {worst_rel:.2e}; "
                   f"elapsed {elapsed:.2f}s (limit 10s)", start)


def ftpl_bound(ctx) -> CriterionResult:
    """Mean perturbed-leader regret stays under R/delta + delta d R sum ||w||^2."""
    start = time.perf_counter()
    dim, horizon = 4, 1024
    domain = Box.unit(dim)
    grad_bound = 1.0
    delta = policy_delta(grad_bound, dim, horizon, beta=0.0)
    coeff_rng = np.random.default_rng(7)
    coeffs = coeff_rng.choice([-1.0, 1.0], size=(horizon, dim))

    diam_l1 = domain.diameter()
    bound = diam_l1 / delta + delta * dim * diam_l1 * float(
        np.sum(np.max(np.abs(coeffs), axis=1) ** 2))

    vertices = np.array([[(i >> j) & 1 for j in range(dim)] for i in range(2 ** dim)],
                        dtype=np.float64)
    best_fixed = float(np.min(vertices @ coeffs.sum(axis=0)))

    regrets = np.empty(200)
    for draw in range(200):
        oracle = FollowPerturbedLeader(domain, delta,
                                       np.random.default_rng([11, draw]))
        played = 0.0
        for t in range(horizon):
            x = oracle.select()
            if not domain.contains(x, FEASIBILITY_TOL):
                return _result("ftpl_bound", False,
                               "FTPL selected an infeasible point", start)
            played += float(coeffs[t] @ x)
            oracle.observe(coeffs[t])
        regrets[draw] = played - best_fixed
    mean_regret = float(np.mean(regrets))
    elapsed = time.perf_counter() - start
    passed = mean_regret <= bound and elapsed < 30.0
    return _result("ftpl_bound", passed,
                   f"mean regret {mean_regret:.1f} <= bound {bound:.1f}; "
                   f"elapsed {elapsed:.2f}s (limit 30s)", start)


def step_product_bound(ctx) -> CriterionResult:
    """prod_{k=l}^{K} (1 - 2/(k+1)) <= ((l+1)/(K+2))^2 for all l, K <= 200."""
    start = time.perf_counter()
    worst = -math.inf
    for cap in range(1, 201):
        suffix = 1.0
        products = [1.0] * (cap + 2)  # products[l] = prod_{k=l}^{cap}
        for ell in range(cap, 0, -1):
            suffix *= 1.0 - fw_step(ell)
            products[ell] = suffix
        for ell in range(1, cap + 2):
            margin = products[ell] - ((ell + 1) / (cap + 2)) ** 2
            worst = max(worst, margin)
    passed = worst <= 1e-12
    elapsed = time.perf_counter() - start
    return _result("step_product_bound", passed and elapsed < 1.0,
                   f"worst margin {worst:.2e} (tol 1e-12); "
                   f"elapsed {elapsed:.3f}s (limit 1s)", start)


def parameter_arithmetic(ctx) -> CriterionResult:
    """Pinned schedule arithmetic and exact step-size couplings."""
    start = time.perf_counter()
    meta = OracleMeta(alpha=0.75, c0=0.0, c1=2.0, c2=0.0)
    bounds = ProblemBounds(grad_bound_l2=1.0, grad_bound_inf=1.0, smoothness=1.0,
                           constraint_bound=1.0, diam_l1=1.0, diam_l2=1.0, dim=1)
    blocked = derive_blocked_params(4096, meta, bounds, beta=0.0)
    checks = [
        (blocked.Q == 16, f"Q={blocked.Q} (want 16)"),
        (blocked.K == 256, f"K={blocked.K} (want 256)"),
        (abs(blocked.theta * blocked.mu * (blocked.Q + 1) - 1.0) <= 1e-12,
         "theta*mu*(Q+1) == 1"),
    ]
    mf = derive_meta_fw_params(256, bounds, beta=0.25)
    checks += [
        (mf.K == 64, f"meta-fw K={mf.K} (want 64)"),
        (abs(mf.mu * mf.theta * (256 + 2) - 1.0) <= 1e-12,
         "mu*theta*(T+2) == 1"),
    ]
    failed = [msg for ok, msg in checks if not ok]
    detail = "; ".join(msg for _, msg in checks) if not failed else \
        "failed: " + "; ".join(failed)
    return _result("parameter_arithmetic", not failed, detail, start)


def dual_update_exactness(ctx) -> CriterionResult:
    """Both dual recursions reproduce the reference expression bit-for-bit."""
    start = time.perf_counter()
    rng = np.random.default_rng(99)
    n = 100_000
    lams = np.abs(rng.standard_normal(n)) * rng.uniform(0.0, 10.0, n)
    gs = rng.standard_normal(n) * rng.uniform(0.0, 50.0, n)
    thetas = rng.uniform(1e-6, 5.0, n)
    mus = rng.uniform(1e-6, 2.0, n)
    for lam, g, theta, mu in zip(lams, gs, thetas, mus):
        reference = max(0.0, (1.0 - theta * mu) * lam + mu * g)
        got_block = block_dual_update(lam, g, theta, mu)
        got_round = dual_update(lam, g, theta, mu)
        if got_block != reference or got_round != reference:
            return _result("dual_update_exactness", False,
                           f"mismatch at ({lam}, {g}, {theta}, {mu})", start)
        if not got_block >= 0.0:
            return _result("dual_update_exactness", False,
                           "negative multiplier produced", start)
    return _result("dual_update_exactness", True,
                   f"{n} tuples reproduced bit-for-bit, all nonnegative", start)


def meta_fw_regret_growth(ctx) -> CriterionResult:
    """Desk-scale matrix completion: seed-mean regret slope and centered violation."""
    start = time.perf_counter()
    cells = ctx.meta_fw_cells()
    mean_regret = []
    for horizon in META_FW_HORIZONS:
        vals = [cells[(horizon, seed)].summary.regret for seed in range(N_SEEDS)]
        mean_regret.append(float(np.mean(vals)))
    slope, r2 = slope_fit(META_FW_HORIZONS, prepare_metric(mean_regret))

    final_viol = np.array([cells[(META_FW_HORIZONS[-1], seed)].summary.violation
                           for seed in range(N_SEEDS)])
    viol_mean = float(np.mean(final_viol))
    viol_se = float(np.std(final_viol, ddof=1) / math.sqrt(N_SEEDS))
    centered = abs(viol_mean) <= 3.0 * viol_se

    elapsed = time.perf_counter() - start
    slope_ok = slope <= 0.7
    passed = slope_ok and centered and elapsed < 300.0
    return _result(
        "meta_fw_regret_growth", passed,
        f"regret slope {slope:.3f} (limit 0.7, r2={r2:.3f}); "
        f"violation mean {viol_mean:.2f} vs 3*SE {3 * viol_se:.2f} at "
        f"T={META_FW_HORIZONS[-1]}; elapsed {elapsed:.1f}s (limit 300s)",
        start)


def blocked_regret_growth(ctx) -> CriterionResult:
    """Blocked driver with the conditional-gradient oracle on the quadratic testbed."""
    start = time.perf_counter()
    cells = ctx.blocked_cells()
    mean_regret = []
    for horizon in BLOCKED_HORIZONS:
        vals = [cells[(horizon, seed)].summary.regret for seed in range(N_SEEDS)]
        mean_regret.append(float(np.mean(vals)))
    slope, r2 = slope_fit(BLOCKED_HORIZONS, prepare_metric(mean_regret))
    limit = (2.0 - 0.75) / (3.0 - 1.5) + 0.1
    elapsed = time.perf_counter() - start
    passed = slope <= limit and elapsed < 300.0
    return _result(
        "blocked_regret_growth", passed,
        f"regret slope {slope:.3f} (limit {limit:.3f}, r2={r2:.3f}); "
        f"elapsed {elapsed:.1f}s (limit 300s)", start)


def feasibility_sweep(ctx) -> CriterionResult:
    """Every decision logged by the growth sweeps lies in its domain."""
    start = time.perf_counter()
    checked = 0
    for cells in (ctx.meta_fw_cells(), ctx.blocked_cells()):
        for cell in cells.values():
            for x in cell.points:
                if not cell.domain.contains(x, FEASIBILITY_TOL):
                    return _result("feasibility_sweep", False,
                                   "infeasible logged decision found", start)
                checked += 1
    return _result("feasibility_sweep", True,
                   f"{checked} logged decisions feasible at tol 1e-8", start)


def determinism(ctx) -> CriterionResult:
    """Re-running any cell with the same master seed gives identical CSV bytes."""
    start = time.perf_counter()
    cfg = {
        "problem": {"name": "matrix_completion", "m": 10, "n": 10, "k": 2.0,
                    "b": 20},
        "algorithm": "meta-fw",
        "oracle": "ftpl",
        "T": 16,
        "beta": 0.1,
        "seeds": [0],
        "output_dir": None,
    }
    blobs = []
    for _ in range(2):
        with tempfile.TemporaryDirectory() as tmp:
            cfg_run = dict(cfg, output_dir=tmp)
            records_path, _ = run_single(cfg_run)
            with open(records_path, "rb") as fh:
                blobs.append(fh.read())
    if blobs[0] != blobs[1]:
        return _result("determinism", False,
                       "repeated run produced different records CSV", start)

    from .metrics import write_records_csv

    cell_blobs = []
    for _ in range(2):
        cell = execute_cell(BLOCKED_PROBLEM, "blocked", 256, 0.0, seed=0)
        with tempfile.TemporaryDirectory() as tmp:
            path = f"{tmp}/records.csv"
            write_records_csv(path, cell.records)
            with open(path, "rb") as fh:
                cell_blobs.append(fh.read())
    passed = cell_blobs[0] == cell_blobs[1]
    return _result("determinism", passed,
                   "records CSVs byte-identical across repeats" if passed
                   else "blocked cell repeat differed", start)


CRITERIA = [
    lmo_correctness,
    ftpl_bound,
    step_product_bound,
    parameter_arithmetic,
    dual_update_exactness,
    meta_fw_regret_growth,
    blocked_regret_growth,
    feasibility_sweep,
    determinism,
]


def run_all(only=None, ctx: AcceptanceContext | None = None):
    ctx = ctx or AcceptanceContext()
    selected = CRITERIA if not only else [c for c in CRITERIA
                                          if c.__name__ in set(only)]
    if only and not selected:
        raise ValueError(f"no criteria match {only}; "
                         f"known: {[c.__name__ for c in CRITERIA]}")
    return [criterion(ctx) for criterion in selected]
