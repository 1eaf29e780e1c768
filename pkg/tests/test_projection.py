import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.stats import ortho_group

from oracles import tn_double_loop

from distspec.projection import (
    closed_form_kernel_integral,
    kernel_integral_oracle,
    pairwise_weights,
    tn_statistic,
    validate_closed_form,
)


class TestPairwiseWeights:
    def test_identical_points_weight_one(self):
        W = pairwise_weights([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]]).W
        assert W[0, 1] == 1.0

    def test_squared_distance_three(self):
        W = pairwise_weights([[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]]).W
        assert W[0, 1] == pytest.approx(0.5, rel=1e-15)

    def test_entrywise_recomputation(self, rng):
        X = rng.standard_normal((5, 3))
        W = pairwise_weights(X).W
        for i in range(5):
            for j in range(5):
                expected = 0.0 if i == j else 1 / math.sqrt(1 + np.sum((X[i] - X[j]) ** 2))
                assert W[i, j] == pytest.approx(expected, rel=1e-14)

    def test_structure(self, rng):
        W = pairwise_weights(rng.standard_normal((20, 4))).W
        np.testing.assert_array_equal(W, W.T)
        np.testing.assert_array_equal(np.diag(W), 0.0)
        off = W[~np.eye(20, dtype=bool)]
        assert (off > 0).all() and (off < 1).all()


class TestTnStatistic:
    def test_zero_residuals(self, rng):
        assert tn_statistic(np.zeros(6), pairwise_weights(rng.standard_normal((6, 2)))) == 0.0

    def test_two_point(self):
        assert tn_statistic([1.0, -1.0], pairwise_weights([[0.0], [0.0]])) == pytest.approx(-2.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_double_loop(self, seed):
        g = np.random.default_rng(seed)
        X, e = g.standard_normal((6, 3)), g.standard_normal(6)
        assert tn_statistic(e, pairwise_weights(X)) == pytest.approx(tn_double_loop(e, X), rel=1e-12)

    def test_length_mismatch(self, rng):
        with pytest.raises(ValueError):
            tn_statistic(np.ones(4), pairwise_weights(rng.standard_normal((5, 2))))

    def test_cached_weights_bit_identical(self, rng):
        X, e = rng.standard_normal((30, 3)), rng.standard_normal(30)
        W = pairwise_weights(X)
        assert tn_statistic(e, W) == tn_statistic(e, pairwise_weights(X))

    def test_scale_changes_statistic(self, rng):
        X, e = rng.standard_normal((30, 3)), rng.standard_normal(30)
        assert tn_statistic(e, pairwise_weights(X)) != tn_statistic(e, pairwise_weights(2 * X))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.integers(2, 6))
def test_rigid_motion_invariance(seed, p):
    g = np.random.default_rng(seed)
    X, e = g.standard_normal((12, p)), g.standard_normal(12)
    Q = ortho_group.rvs(p, random_state=g)
    c = g.normal(0, 5, p)
    a = tn_statistic(e, pairwise_weights(X))
    b = tn_statistic(e, pairwise_weights(X @ Q.T + c))
    assert b == pytest.approx(a, rel=1e-10, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    X=arrays(np.float64, (9, 3), elements=st.floats(-4, 4)),
    e=arrays(np.float64, 9, elements=st.floats(-4, 4)),
    perm=st.permutations(range(9)),
)
def test_permutation_equivariance(X, e, perm):
    perm = np.array(perm)
    a = tn_statistic(e, pairwise_weights(X))
    b = tn_statistic(e[perm], pairwise_weights(X[perm]))
    assert b == pytest.approx(a, rel=1e-12, abs=1e-12)


class TestKernelOracle:
    def test_coincident_points_exact(self):
        est = kernel_integral_oracle([0.3, 1.0], [0.3, 1.0], h=0.7, draws=10_000)
        assert est.estimate == 1 / (0.7 * math.sqrt(2 * math.pi))
        assert est.std_error == 0.0

    def test_two_dimensional_case(self):
        est = kernel_integral_oracle([1.0, 0.0], [0.0, 0.0], h=0.5, draws=1_000_000, seed=3)
        closed = 1 / (0.5 * math.sqrt(2 * math.pi)) / math.sqrt(2)
        assert closed_form_kernel_integral([1.0, 0.0], [0.0, 0.0], 0.5) == pytest.approx(closed, rel=1e-15)
        assert abs(est.estimate - closed) <= 4 * est.std_error

    def test_eight_dimensional_case(self, rng):
        xi, xj = rng.standard_normal(8), rng.standard_normal(8)
        est = kernel_integral_oracle(xi, xj, h=1.0, draws=1_000_000, seed=9)
        assert abs(est.estimate - closed_form_kernel_integral(xi, xj, 1.0)) <= 4 * est.std_error

    def test_general_direction_variance(self, rng):
        # sigma != h: closed form (2 pi)^(-1/2) (sigma^2 d + h^2)^(-1/2)
        xi, xj = rng.standard_normal(3), rng.standard_normal(3)
        est = kernel_integral_oracle(xi, xj, h=0.6, draws=400_000, seed=4, sigma=1.7)
        closed = closed_form_kernel_integral(xi, xj, 0.6, sigma=1.7)
        assert abs(est.estimate - closed) <= 4 * est.std_error

    def test_rejects_nonpositive_bandwidth(self):
        with pytest.raises(ValueError):
            kernel_integral_oracle([0.0], [1.0], h=0.0)

    def test_many_random_cases(self):
        cases = validate_closed_form(cases=50, draws=100_000, seed=2)
        within = sum(c.z <= 4 for c in cases)
        assert within >= 0.95 * len(cases)
