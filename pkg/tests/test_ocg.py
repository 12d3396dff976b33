import math

import numpy as np
import pytest

from pfoco.domains import Box, L1Ball
from pfoco.metrics import prepare_metric, slope_fit
from pfoco.ocg import OnlineConditionalGradient, OracleMeta, regret_audit


class TestOracleMeta:
    def test_requires_smooth_iff_c2_positive(self):
        assert not OracleMeta(0.75, 0.0, 1.0, 0.0).requires_smooth
        assert OracleMeta(0.5, 0.0, 1.0, 2.0).requires_smooth

    def test_validation(self):
        with pytest.raises(ValueError):
            OracleMeta(1.0, 0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            OracleMeta(0.5, -1.0, 1.0, 0.0)


class TestConstruction:
    def test_step_scale_uses_three_quarter_power(self, rng):
        domain = Box.unit(2)
        oracle = OnlineConditionalGradient(domain, np.zeros(2), horizon=256,
                                           grad_bound=3.0, rng=rng)
        assert oracle.eta == pytest.approx(
            domain.diameter_euclidean() / (2.0 * 3.0 * 64.0))

    def test_deterministic_given_seed(self):
        domain = Box.unit(3)
        grads = [np.array([1.0, -1.0, 0.5]), np.array([-0.2, 0.4, 0.1])]
        runs = []
        for _ in range(2):
            oracle = OnlineConditionalGradient(domain, np.zeros(3), 16, 1.0,
                                               np.random.default_rng(5))
            runs.append([oracle.step(g).copy() for g in grads])
        for a, b in zip(*runs):
            np.testing.assert_array_equal(a, b)

    def test_infeasible_start_rejected(self, rng):
        with pytest.raises(ValueError, match="outside"):
            OnlineConditionalGradient(Box.unit(2), np.array([2.0, 0.0]), 8, 1.0,
                                      rng)

    def test_bad_arguments(self, rng):
        with pytest.raises(ValueError):
            OnlineConditionalGradient(Box.unit(2), np.zeros(2), 0, 1.0, rng)
        with pytest.raises(ValueError):
            OnlineConditionalGradient(Box.unit(2), np.zeros(2), 8, 0.0, rng)


class _FixedLmoDomain(Box):
    """Unit box whose LMO returns scripted points (step-schedule probe)."""

    def __init__(self, dim, script):
        super().__init__(np.zeros(dim), np.ones(dim))
        self.script = list(script)
        self.calls = 0

    def lmo(self, w, rng=None):
        v = self.script[min(self.calls, len(self.script) - 1)]
        self.calls += 1
        return np.array(v, dtype=np.float64)


class TestStepSchedule:
    def test_first_step_jumps_to_vertex(self, rng):
        domain = Box.unit(2)
        oracle = OnlineConditionalGradient(domain, np.full(2, 0.5), 16, 1.0, rng)
        out = oracle.step(np.array([1.0, -1.0]))
        np.testing.assert_array_equal(out, domain.lmo(np.array([1.0, -1.0]), rng))

    def test_mixing_follows_two_over_sqrt_t(self, rng):
        script = [np.zeros(1) if k % 2 == 0 else np.ones(1) for k in range(12)]
        domain = _FixedLmoDomain(1, script)
        oracle = OnlineConditionalGradient(domain, np.full(1, 0.5), 12, 1.0, rng)
        x = np.full(1, 0.5)
        for t, v in enumerate(script, start=1):
            got = oracle.step(np.zeros(1))
            x = x + min(1.0, 2.0 / math.sqrt(t)) * (v - x)
            np.testing.assert_allclose(got, x, atol=1e-15)

    def test_iterates_stay_feasible(self, rng):
        domain = L1Ball(1.0, 4)
        oracle = OnlineConditionalGradient(domain, np.zeros(4), 64, 2.0, rng)
        for _ in range(64):
            out = oracle.step(rng.standard_normal(4))
            assert domain.contains(out, 1e-8)

    def test_constant_gradient_tracks_regularized_leader(self, rng):
        # offline oracle: 100x100 grid search on the anchored objective
        domain = Box.unit(2)
        w = np.array([0.6, -0.9])
        horizon = 128
        x0 = np.full(2, 0.5)
        oracle = OnlineConditionalGradient(domain, x0, horizon, 1.0, rng)
        for _ in range(horizon):
            x = oracle.step(w)

        def objective(pt):
            return (oracle.eta * horizon * float(w @ pt)
                    + float(np.sum((pt - x0) ** 2)))

        grid = np.linspace(0.0, 1.0, 100)
        best = min(objective(np.array([a, b])) for a in grid for b in grid)
        assert objective(x) <= best + 0.05 * (1.0 + abs(best))


class TestRegretAudit:
    def test_single_round_at_optimum_is_zero(self, rng):
        domain = Box.unit(2)
        h = lambda x: (float(np.array([1.0, 1.0]) @ x), np.array([1.0, 1.0]))
        audit = regret_audit([(h, np.zeros(2))], domain, rng, n_samples=200,
                             polish_iters=50)
        assert audit == pytest.approx(0.0, abs=1e-9)

    def test_linear_losses_match_vertex_enumeration(self, rng):
        domain = Box.unit(3)
        history = []
        total = np.zeros(3)
        for _ in range(5):
            w = rng.standard_normal(3)
            total += w

            def h(x, _w=w):
                return float(_w @ x), _w

            history.append((h, domain.sample(rng)))
        audit = regret_audit(history, domain, rng, n_samples=500,
                             polish_iters=100)
        vertices = np.array([[(i >> j) & 1 for j in range(3)]
                             for i in range(8)], dtype=np.float64)
        realized = sum(h(x)[0] for h, x in history)
        expected = realized - float(np.min(vertices @ total))
        assert audit == pytest.approx(expected, abs=1e-9)

    def test_nonnegative_for_repeated_losses(self, rng):
        # a fixed loss across rounds can never beat its own best point
        domain = L1Ball(1.0, 3)
        for _ in range(10):
            c = rng.uniform(-1, 1, size=3)

            def h(x, _c=c):
                return 0.5 * float((x - _c) @ (x - _c)), x - _c

            history = [(h, domain.sample(rng)) for _ in range(4)]
            audit = regret_audit(history, domain, rng, n_samples=300,
                                 polish_iters=200)
            assert audit >= -1e-9

    def test_empty_history_rejected(self, rng):
        with pytest.raises(ValueError):
            regret_audit([], Box.unit(1), rng)


def test_regret_sublinear_on_stochastic_quadratics():
    """Realized regret at K in {64, 256, 1024} fits slope <= 0.85."""
    horizons = [64, 256, 1024]
    domain = L1Ball(1.0, 6)
    mean_regret = []
    for horizon in horizons:
        regrets = []
        for seed in range(10):
            data_rng = np.random.default_rng([seed, horizon])
            centers = data_rng.uniform(-0.5, 0.5, size=(horizon, 6))
            oracle = OnlineConditionalGradient(
                domain, domain.canonical_point(), horizon,
                grad_bound=2.0, rng=np.random.default_rng([seed, horizon, 1]))
            realized = 0.0
            for c in centers:
                x = oracle.current()
                realized += 0.5 * float((x - c) @ (x - c))
                oracle.step(x - c)
            # offline comparator: long Frank-Wolfe run on the aggregate
            count, s = horizon, centers.sum(axis=0)
            sq = float(np.sum(centers ** 2))
            x = domain.canonical_point()
            solve_rng = np.random.default_rng(0)
            for k in range(1, 20001):
                grad = count * x - s
                v = domain.lmo(grad, solve_rng)
                x = x + (2.0 / (k + 1)) * (v - x)
            best = 0.5 * (count * float(x @ x) - 2 * float(s @ x) + sq)
            regrets.append(realized - best)
        mean_regret.append(float(np.mean(regrets)))
    slope, _ = slope_fit(horizons, prepare_metric(mean_regret))
    assert slope <= 0.85


def test_oracle_consumes_only_past_rounds(rng):
    """Gradients are folded in only after the matching decision is emitted."""
    domain = Box.unit(2)
    oracle = OnlineConditionalGradient(domain, np.zeros(2), 8, 1.0, rng)
    emitted, consumed = [], []
    for t in range(8):
        emitted.append(oracle.current())
        consumed.append(t)
        oracle.step(np.ones(2) * t)
    # decision t was available before gradient t was consumed
    assert consumed == list(range(8))
    assert len(emitted) == 8
