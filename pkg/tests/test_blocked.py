import numpy as np
import pytest

from pfoco.blocked import (BlockedParams, block_dual_update,
                           derive_blocked_params, run_blocked)
from pfoco.domains import Box
from pfoco.functions import NON_SMOOTH, ProblemBounds, RoundFunctions
from pfoco.ocg import OracleMeta, ocg_factory
from pfoco.problems import StochasticQuadratic

UNIT_BOUNDS = ProblemBounds(grad_bound_l2=1.0, grad_bound_inf=1.0,
                            smoothness=1.0, constraint_bound=1.0,
                            diam_l1=1.0, diam_l2=1.0, dim=1)
OCG_META = OracleMeta(alpha=0.75, c0=0.0, c1=2.0, c2=0.0)


class TestDeriveParams:
    def test_exponent_arithmetic(self):
        params = derive_blocked_params(4096, OCG_META, UNIT_BOUNDS, beta=0.0)
        assert (params.Q, params.K) == (16, 256)
        # theta = 3 (c1 D + c2 L) T^(1/2) = 3 * 2 * 64
        assert params.theta == pytest.approx(384.0)
        assert params.mu == pytest.approx(1.0 / (17.0 * params.theta))
        assert params.theta * params.mu * (params.Q + 1) == pytest.approx(
            1.0, abs=1e-15)

    def test_non_integer_powers_ceil(self):
        params = derive_blocked_params(1000, OCG_META, UNIT_BOUNDS, beta=0.0)
        assert params.Q == int(np.ceil(1000 ** (1.0 / 3.0)))
        assert params.K == int(np.ceil(1000 ** (2.0 / 3.0)))
        assert params.Q * params.K >= 1000

    def test_beta_interval_enforced(self):
        limit = (1.0 - 0.75) / (3.0 - 1.5)
        derive_blocked_params(256, OCG_META, UNIT_BOUNDS, beta=limit)
        with pytest.raises(ValueError, match=r"\[0, 0.16"):
            derive_blocked_params(256, OCG_META, UNIT_BOUNDS, beta=limit + 0.01)
        with pytest.raises(ValueError):
            derive_blocked_params(256, OCG_META, UNIT_BOUNDS, beta=-0.01)

    def test_smooth_only_oracle_needs_smooth_problem(self):
        rough = ProblemBounds(grad_bound_l2=1.0, grad_bound_inf=1.0,
                              smoothness=NON_SMOOTH, constraint_bound=1.0,
                              diam_l1=1.0, diam_l2=1.0, dim=1)
        smooth_only = OracleMeta(alpha=0.5, c0=0.0, c1=1.0, c2=1.0)
        with pytest.raises(ValueError, match="smooth"):
            derive_blocked_params(256, smooth_only, rough, beta=0.0)
        # a c2 = 0 oracle is fine on the same problem
        derive_blocked_params(256, OCG_META, rough, beta=0.0)

    def test_small_horizon_rejected(self):
        with pytest.raises(ValueError):
            derive_blocked_params(2, OCG_META, UNIT_BOUNDS, beta=0.0)

    def test_validate_recomputes(self):
        params = derive_blocked_params(512, OCG_META, UNIT_BOUNDS, beta=0.1)
        params.validate(OCG_META, UNIT_BOUNDS)
        bad = BlockedParams(T=512, Q=params.Q, K=params.K, alpha=params.alpha,
                            beta=params.beta, theta=params.theta * 2,
                            mu=params.mu)
        with pytest.raises(AssertionError):
            bad.validate(OCG_META, UNIT_BOUNDS)


class TestBlockDualUpdate:
    def test_negative_drift_clamped(self):
        assert block_dual_update(0.0, -5.0, theta=1.0, mu=0.3) == 0.0

    def test_arithmetic(self):
        assert block_dual_update(1.0, -3.0, theta=2.0, mu=0.1) == pytest.approx(0.5)

    def test_from_zero(self):
        # theta*mu = 0.5 with mu = 0.1
        assert block_dual_update(0.0, 4.0, theta=5.0, mu=0.1) == pytest.approx(0.4)

    def test_nonnegative_on_random_inputs(self, rng):
        for _ in range(1000):
            lam = float(np.abs(rng.standard_normal()))
            g = float(rng.standard_normal() * 10)
            theta = float(rng.uniform(0.01, 5))
            mu = float(rng.uniform(0.001, 2))
            assert block_dual_update(lam, g, theta, mu) >= 0.0


def constant_rounds(horizon, g_value, dim=2):
    rounds = []
    for t in range(1, horizon + 1):
        rounds.append(RoundFunctions(
            f=lambda x: (float(x @ x), 2.0 * x),
            g=lambda x, _g=g_value: (_g, np.zeros(dim)),
            t=t,
        ))
    return rounds


class TestRunBlocked:
    def test_single_round_unrolled(self):
        domain = Box.unit(2)
        params = BlockedParams(T=1, Q=1, K=1, alpha=0.75, beta=0.0,
                               theta=2.0, mu=0.25)
        _, factory = ocg_factory(domain)
        rounds = constant_rounds(1, g_value=3.0)
        bounds = ProblemBounds(1.0, 1.0, 1.0, 1.0, 2.0, 1.5, 2)
        log = run_blocked(rounds, domain, params, bounds, factory,
                          np.random.default_rng(0))
        assert len(log.records) == 1
        assert log.records[0].multiplier == 0.0
        # lambda_2 = [mu * g_1(x_1)]_+ with lambda_1 = 0
        assert log.final_multiplier == pytest.approx(0.25 * 3.0)

    def test_negative_constraints_keep_multiplier_zero(self):
        domain = Box.unit(2)
        bounds = ProblemBounds(1.0, 1.0, 1.0, 1.0, 2.0, 1.5, 2)
        meta, factory = ocg_factory(domain)
        params = derive_blocked_params(32, meta, bounds, beta=0.0)
        log = run_blocked(constant_rounds(32, g_value=-1.0), domain, params,
                          bounds, factory, np.random.default_rng(0))
        assert np.all(log.multipliers == 0.0)
        assert log.final_multiplier == 0.0

    def test_deterministic_given_seed(self):
        instance = StochasticQuadratic(dim=3, seed=11)
        domain, bounds = instance.domain(), instance.bounds()
        meta, factory = ocg_factory(domain)
        params = derive_blocked_params(16, meta, bounds, beta=0.0)
        logs = [run_blocked(instance.rounds(16), domain, params, bounds,
                            factory, np.random.default_rng(77))
                for _ in range(2)]
        assert logs[0].records == logs[1].records

    def test_causality(self):
        """Perturbing round t's functions never changes decisions 1..t."""
        instance = StochasticQuadratic(dim=3, seed=5)
        domain, bounds = instance.domain(), instance.bounds()
        meta, factory = ocg_factory(domain)
        params = derive_blocked_params(16, meta, bounds, beta=0.0)
        t_perturbed = 7

        def perturbed_rounds():
            rounds = instance.rounds(16)
            original = rounds[t_perturbed - 1]
            rounds[t_perturbed - 1] = RoundFunctions(
                f=lambda x: (original.f(x)[0] + 100.0, original.f(x)[1] * 3.0),
                g=original.g, t=original.t)
            return rounds

        log_a = run_blocked(instance.rounds(16), domain, params, bounds,
                            factory, np.random.default_rng(1))
        log_b = run_blocked(perturbed_rounds(), domain, params, bounds,
                            factory, np.random.default_rng(1))
        hashes_a = [rec.x_hash for rec in log_a.records]
        hashes_b = [rec.x_hash for rec in log_b.records]
        assert hashes_a[:t_perturbed] == hashes_b[:t_perturbed]
        assert hashes_a[t_perturbed:] != hashes_b[t_perturbed:]

    def test_short_stream_rejected(self):
        domain = Box.unit(2)
        bounds = ProblemBounds(1.0, 1.0, 1.0, 1.0, 2.0, 1.5, 2)
        meta, factory = ocg_factory(domain)
        params = derive_blocked_params(32, meta, bounds, beta=0.0)
        with pytest.raises(ValueError, match="rounds"):
            run_blocked(constant_rounds(10, 0.0), domain, params, bounds,
                        factory, np.random.default_rng(0))

    def test_infeasible_oracle_detected(self):
        domain = Box.unit(2)
        bounds = ProblemBounds(1.0, 1.0, 1.0, 1.0, 2.0, 1.5, 2)

        class RogueOracle:
            def current(self):
                return np.array([5.0, 5.0])

            def step(self, grad):
                return self.current()

        params = derive_blocked_params(16, OCG_META, bounds, beta=0.0)
        with pytest.raises(RuntimeError, match="infeasible"):
            run_blocked(constant_rounds(16, 0.0), domain, params, bounds,
                        lambda *a, **k: RogueOracle(),
                        np.random.default_rng(0))

    def test_multiplier_constant_within_blocks(self):
        instance = StochasticQuadratic(dim=3, seed=2, direction_mean=0.5,
                                       offset=0.2)
        domain, bounds = instance.domain(), instance.bounds()
        meta, factory = ocg_factory(domain)
        params = derive_blocked_params(64, meta, bounds, beta=0.0)
        log = run_blocked(instance.rounds(64), domain, params, bounds, factory,
                          np.random.default_rng(3))
        lams = log.multipliers
        for q in range(params.Q):
            block = lams[q * params.K: (q + 1) * params.K]
            assert np.all(block == block[0])
        assert np.all(lams >= 0.0)
