import math

import numpy as np
import pytest

from pfoco.domains import (Box, L1Ball, NuclearBall, NullMatrixError, Point,
                           Simplex, default_power_iters, power_iteration)

ALL_KINDS = [
    Box(np.array([-1.0, 0.0, 0.5]), np.array([1.0, 2.0, 0.5])),
    L1Ball(2.0, 4),
    Simplex(5),
    NuclearBall(1.5, 3, 4),
]


class TestPoint:
    def test_valid(self):
        p = Point(np.array([1.0, 2.0, 3.0, 4.0]), shape=(2, 2))
        assert p.dim == 4
        np.testing.assert_array_equal(p.as_matrix(), [[1.0, 2.0], [3.0, 4.0]])

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="non-finite"):
            Point(np.array([1.0, np.nan]))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="incompatible"):
            Point(np.zeros(5), shape=(2, 2))

    def test_no_shape_no_matrix(self):
        with pytest.raises(ValueError):
            Point(np.zeros(3)).as_matrix()


class TestLmoExamples:
    def test_box_sign_rule(self, rng):
        box = Box.unit(2)
        np.testing.assert_array_equal(box.lmo(np.array([1.0, -1.0]), rng),
                                      [0.0, 1.0])

    def test_l1_mass_on_largest_coordinate(self, rng):
        ball = L1Ball(2.0, 2)
        np.testing.assert_array_equal(ball.lmo(np.array([3.0, -4.0]), rng),
                                      [0.0, 2.0])

    def test_nuclear_diagonal(self, rng):
        # top singular pair of diag(2, 1) is (e1, e1, 2): atom -5 e1 e1^T
        dom = NuclearBall(5.0, 2, 2)
        w = np.diag([2.0, 1.0]).ravel()
        atom = dom.lmo(w, rng)
        assert float(w @ atom) == pytest.approx(-10.0, rel=1e-9)
        np.testing.assert_allclose(atom, [-5.0, 0.0, 0.0, 0.0], atol=1e-5)

    def test_simplex_smallest_coordinate(self, rng):
        np.testing.assert_array_equal(
            Simplex(3).lmo(np.array([0.5, -0.2, 0.1]), rng), [0.0, 1.0, 0.0])


class TestLmoProperties:
    @pytest.mark.parametrize("domain", ALL_KINDS, ids=lambda d: d.kind)
    def test_beats_random_feasible_points(self, domain, rng):
        samples = np.array([domain.sample(rng) for _ in range(100)])
        for _ in range(1000):
            w = rng.standard_normal(domain.dim)
            achieved = float(w @ domain.lmo(w, rng))
            assert achieved <= float(np.min(samples @ w)) + 1e-9

    @pytest.mark.parametrize("domain", ALL_KINDS, ids=lambda d: d.kind)
    def test_output_feasible(self, domain, rng):
        for _ in range(200):
            w = rng.standard_normal(domain.dim) * 10.0 ** rng.integers(-3, 4)
            assert domain.contains(domain.lmo(w, rng), 1e-8)

    @pytest.mark.parametrize("domain", ALL_KINDS, ids=lambda d: d.kind)
    def test_scaling_equivariance(self, domain, rng):
        for _ in range(25):
            w = rng.standard_normal(domain.dim)
            base = float(w @ domain.lmo(w, rng))
            for c in (0.5, 3.0, 1e3):
                scaled = float(w @ domain.lmo(c * w, rng))
                assert scaled == pytest.approx(base, rel=1e-9, abs=1e-9)

    def test_nuclear_matches_dense_svd(self, rng):
        radius = 2.0
        dom = NuclearBall(radius, 8, 8)
        for _ in range(30):
            w_mat = rng.standard_normal((8, 8))
            achieved = float(w_mat.ravel() @ dom.lmo(w_mat.ravel(), rng))
            expected = -radius * float(np.linalg.svd(w_mat, compute_uv=False)[0])
            assert achieved == pytest.approx(expected, rel=1e-6)

    @pytest.mark.parametrize("domain", ALL_KINDS, ids=lambda d: d.kind)
    def test_zero_objective_returns_canonical(self, domain, rng):
        np.testing.assert_array_equal(domain.lmo(np.zeros(domain.dim), rng),
                                      domain.canonical_point())
        tiny = np.full(domain.dim, 1e-14)
        np.testing.assert_array_equal(domain.lmo(tiny, rng),
                                      domain.canonical_point())

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValueError, match="dimension mismatch"):
            Box.unit(3).lmo(np.zeros(4), rng)

    def test_non_finite_objective(self, rng):
        with pytest.raises(ValueError, match="non-finite"):
            L1Ball(1.0, 2).lmo(np.array([np.inf, 0.0]), rng)


class TestContainsAndDiameter:
    def test_box_membership(self):
        assert Box.unit(2).contains(np.array([0.5, 1.0]))
        assert not Box.unit(2).contains(np.array([0.5, 1.1]))

    def test_l1_membership(self):
        assert not L1Ball(1.0, 2).contains(np.array([0.7, 0.7]), 1e-9)
        assert L1Ball(1.0, 2).contains(np.array([0.5, 0.5]), 1e-9)

    def test_simplex_membership(self):
        assert Simplex(3).contains(np.array([0.2, 0.3, 0.5]))
        assert not Simplex(3).contains(np.array([0.5, 0.6, -0.1]))

    def test_nuclear_membership(self):
        dom = NuclearBall(1.0, 2, 2)
        assert dom.contains(np.array([0.5, 0.0, 0.0, 0.5]))  # nuclear norm 1
        assert not dom.contains(np.array([0.8, 0.0, 0.0, 0.8]))

    def test_diameters(self):
        assert Box(np.array([0.0, -1.0]), np.array([1.0, 3.0])).diameter() == 5.0
        assert L1Ball(2.0, 7).diameter() == 4.0
        assert Simplex(6).diameter() == 2.0
        assert NuclearBall(2.0, 3, 5).diameter() == pytest.approx(
            4.0 * math.sqrt(3.0))
        assert NuclearBall(2.0, 3, 5).diameter_euclidean() == 4.0

    def test_sample_feasible(self, rng):
        for domain in ALL_KINDS:
            for _ in range(50):
                assert domain.contains(domain.sample(rng), 1e-8)


class TestDomainValidation:
    def test_box_ordering(self):
        with pytest.raises(ValueError, match="lo <= hi"):
            Box(np.array([1.0]), np.array([0.0]))

    def test_box_degenerate(self):
        with pytest.raises(ValueError, match="degenerate"):
            Box(np.array([1.0, 2.0]), np.array([1.0, 2.0]))

    def test_positive_radius(self):
        with pytest.raises(ValueError):
            L1Ball(0.0, 3)
        with pytest.raises(ValueError):
            NuclearBall(-1.0, 2, 2)


class TestPowerIteration:
    def test_diagonal(self, rng):
        u, v, sigma = power_iteration(np.diag([3.0, 1.0]), rng=rng)
        assert sigma == pytest.approx(3.0, rel=1e-9)
        # signs are consistent: mat @ v == sigma * u
        assert abs(u[0]) == pytest.approx(1.0, abs=1e-6)
        assert abs(v[0]) == pytest.approx(1.0, abs=1e-6)
        np.testing.assert_allclose(np.diag([3.0, 1.0]) @ v, sigma * u, atol=1e-12)

    def test_rank_one_closed_form(self, rng):
        a, b = np.array([1.0, 2.0]), np.array([2.0, 0.0])
        _, _, sigma = power_iteration(np.outer(a, b), rng=rng)
        assert sigma == pytest.approx(np.linalg.norm(a) * np.linalg.norm(b),
                                      rel=1e-12)

    def test_null_matrix_signal(self, rng):
        with pytest.raises(NullMatrixError):
            power_iteration(np.zeros((3, 3)), rng=rng)

    def test_default_budget(self):
        assert default_power_iters(8, 8) == 1 + math.ceil(10 * math.log(8))

    def test_bad_arguments(self, rng):
        with pytest.raises(ValueError):
            power_iteration(np.eye(2), max_iters=0, rng=rng)
        with pytest.raises(ValueError):
            power_iteration(np.array([[np.nan, 0.0], [0.0, 1.0]]), rng=rng)
        with pytest.raises(ValueError):
            power_iteration(np.eye(2), rng=None)
