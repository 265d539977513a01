import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from funcgraph.errors import NumericalFailureError
from funcgraph.mcmc_core import (
    BlockPrecisionState,
    McmcConfig,
    ScatterMatrix,
    column_gamma_params,
    draw_gamma,
    draw_inverse_gamma,
    draw_inverse_gaussian,
    draw_mvn,
    free_block_inverse,
    log_likelihood,
    partition_column,
    update_column,
)


class TestInverseGaussian:
    def test_moments_against_analytic_values(self):
        rng = np.random.default_rng(0)
        draws = draw_inverse_gaussian(2.0, 8.0, rng, size=1_000_000)
        assert abs(draws.mean() - 2.0) <= 0.01 * 2.0  # analytic mean = mu
        assert abs(draws.var() - 1.0) <= 0.02 * 1.0  # analytic var = mu^3 / shape

    @given(
        mean=st.floats(1e-3, 1e3),
        shape=st.floats(1e-3, 1e3),
        seed=st.integers(0, 2**31),
    )
    @settings(max_examples=60, deadline=None)
    def test_strictly_positive(self, mean, shape, seed):
        rng = np.random.default_rng(seed)
        draws = draw_inverse_gaussian(mean, shape, rng, size=200)
        assert np.all(draws > 0.0)

    def test_rejects_nonpositive_parameters(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            draw_inverse_gaussian(0.0, 1.0, rng)
        with pytest.raises(ValueError):
            draw_inverse_gaussian(1.0, -2.0, rng)


class TestGammaFamily:
    def test_gamma_mean(self):
        rng = np.random.default_rng(1)
        draws = draw_gamma(51.0, 2.0, rng, size=1_000_000)
        assert abs(draws.mean() - 25.5) <= 0.01 * 25.5

    def test_inverse_gamma_reciprocal_is_exponential(self):
        rng = np.random.default_rng(2)
        draws = draw_inverse_gamma(1.0, 1.0, rng, size=1_000_000)
        assert abs((1.0 / draws).mean() - 1.0) <= 0.01

    def test_gamma_shape_one_is_exponential(self):
        rng = np.random.default_rng(3)
        rate = 2.5
        draws = draw_gamma(1.0, rate, rng, size=500_000)
        assert abs(draws.mean() - 1.0 / rate) <= 0.01 / rate
        assert abs(draws.var() - 1.0 / rate**2) <= 0.03 / rate**2

    def test_rejects_nonpositive_parameters(self):
        rng = np.random.default_rng(0)
        for fn in (draw_gamma, draw_inverse_gamma):
            with pytest.raises(ValueError):
                fn(0.0, 1.0, rng)
            with pytest.raises(ValueError):
                fn(1.0, 0.0, rng)


class TestMvn:
    def test_identity_covariance_unit_variances(self):
        rng = np.random.default_rng(4)
        draws = np.array([draw_mvn(np.zeros(3), np.eye(3), rng) for _ in range(200_000)])
        np.testing.assert_allclose(draws.var(axis=0), 1.0, rtol=0.01)

    def test_diagonal_covariance_scales_sd(self):
        rng = np.random.default_rng(5)
        cov = np.diag([4.0, 4.0])
        draws = np.array([draw_mvn(np.zeros(2), cov, rng) for _ in range(200_000)])
        np.testing.assert_allclose(draws.std(axis=0), 2.0, rtol=0.01)

    def test_seed_reproducibility(self):
        cov = np.array([[2.0, 0.5], [0.5, 1.0]])
        a = draw_mvn(np.ones(2), cov, np.random.default_rng(7))
        b = draw_mvn(np.ones(2), cov, np.random.default_rng(7))
        assert np.array_equal(a, b)

    def test_non_pd_covariance_raises(self):
        with pytest.raises(NumericalFailureError):
            draw_mvn(np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]), np.random.default_rng(0))


def make_state(p, m, seed=0, sweeps=0):
    """Identity-initialized state with a scatter from simulated scores."""
    rng = np.random.default_rng(seed)
    scores = rng.normal(size=(40, p * m))
    scatter = ScatterMatrix(matrix=scores.T @ scores, n=40)
    state = BlockPrecisionState.identity(p, m)
    for _ in range(sweeps):
        for c in range(state.dim):
            part = partition_column(state, scatter, c)
            update_column(state, part, np.ones(part.free.size), 1.0, scatter.n, rng)
        state.refresh_inverse()
    return state, scatter, rng


class TestPartitionColumn:
    def test_two_scalar_nodes(self):
        state, scatter, _ = make_state(2, 1)
        part = partition_column(state, scatter, 0)
        assert part.free.tolist() == [1]
        assert part.zero.size == 0
        assert part.s_diag == scatter.matrix[0, 0]

    def test_hand_index_bookkeeping(self):
        state, scatter, _ = make_state(3, 2)
        part = partition_column(state, scatter, 1)  # node 0, score 1
        assert part.zero.tolist() == [0]
        assert part.free.tolist() == [2, 3, 4, 5]
        np.testing.assert_array_equal(part.s_free, scatter.matrix[[2, 3, 4, 5], 1])

    @given(p=st.integers(1, 6), m=st.integers(1, 4), data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_partition_covers_all_indices(self, p, m, data):
        c = data.draw(st.integers(0, p * m - 1))
        state, scatter, _ = make_state(p, m)
        part = partition_column(state, scatter, c)
        assert part.free.size == m * (p - 1)
        assert part.zero.size == m - 1
        union = sorted([c, *part.free.tolist(), *part.zero.tolist()])
        assert union == list(range(p * m))

    def test_out_of_range(self):
        state, scatter, _ = make_state(2, 2)
        with pytest.raises(IndexError):
            partition_column(state, scatter, 4)


class TestUpdateColumn:
    def test_gamma_shape_is_51_at_n_100(self):
        shape, _ = column_gamma_params(100, 3.0, 4.0)
        assert shape == 51.0

    def test_hand_scalar_spread(self):
        # p=2, M=1, Theta_11 = 1, D = 1, s22 + extra = 1 gives C = 1/2
        state, scatter, _ = make_state(2, 1)
        part = partition_column(state, scatter, 0)
        _, w_ff = free_block_inverse(state, part)
        np.testing.assert_allclose(w_ff, [[1.0]])
        a = 1.0
        c_mat = np.linalg.inv(np.diag([1.0]) + a * w_ff)
        np.testing.assert_allclose(c_mat, [[0.5]])

    def test_determinant_identity_after_writeback(self):
        state, scatter, rng = make_state(3, 2, sweeps=2)
        c = 4
        others = [i for i in range(6) if i != c]
        det_t11 = np.linalg.det(state.theta[np.ix_(others, others)])
        part = partition_column(state, scatter, c)
        _, gamma = update_column(state, part, np.full(part.free.size, 0.7), 2.0, 40, rng)
        det_new = np.linalg.det(state.theta)
        np.testing.assert_allclose(det_new, gamma * det_t11, rtol=1e-10)
        assert det_new > 0.0

    def test_structural_zeros_and_symmetry_exact(self):
        state, scatter, rng = make_state(4, 3, sweeps=3)
        assert np.array_equal(state.theta, state.theta.T)
        assert np.all(state.theta[state.structural_zero_mask()] == 0.0)
        np.linalg.cholesky(state.theta)

    def test_maintained_inverse_tracks_updates(self):
        state, scatter, rng = make_state(3, 2)
        for c in range(state.dim):
            part = partition_column(state, scatter, c)
            update_column(state, part, np.ones(part.free.size), 1.0, scatter.n, rng)
            resid = np.abs(state.theta @ state.sigma - np.eye(state.dim)).max()
            assert resid <= 1e-8

    def test_pd_preserved_over_many_updates(self):
        state, scatter, rng = make_state(5, 2, sweeps=10)
        np.linalg.cholesky(state.theta)
        state.validate()

    def test_bad_d_prior(self):
        state, scatter, rng = make_state(2, 2)
        part = partition_column(state, scatter, 0)
        with pytest.raises(ValueError):
            update_column(state, part, np.array([1.0, -1.0]), 1.0, 40, rng)
        with pytest.raises(ValueError):
            update_column(state, part, np.ones(5), 1.0, 40, rng)

    def test_single_node_degenerate_case(self):
        state, scatter, rng = make_state(1, 3)
        part = partition_column(state, scatter, 1)
        beta, gamma = update_column(state, part, np.empty(0), 1.0, 40, rng)
        assert beta.size == 0 and gamma > 0
        assert state.theta[1, 1] == gamma
        state.validate()


class TestLogLikelihood:
    def test_identity_with_matching_scatter(self):
        d, n = 4, 10
        assert log_likelihood(np.eye(d), n * np.eye(d), n) == pytest.approx(-d)

    def test_zero_scatter(self):
        assert log_likelihood(np.eye(3), np.zeros((3, 3)), 5) == 0.0

    @given(seed=st.integers(0, 1000))
    @settings(max_examples=30, deadline=None)
    def test_invariant_under_joint_permutation(self, seed):
        rng = np.random.default_rng(seed)
        d = 5
        a = rng.normal(size=(d, d))
        theta = a @ a.T + d * np.eye(d)
        b = rng.normal(size=(8, d))
        s = b.T @ b
        perm = rng.permutation(d)
        pt = theta[np.ix_(perm, perm)]
        ps = s[np.ix_(perm, perm)]
        assert log_likelihood(pt, ps, 8) == pytest.approx(log_likelihood(theta, s, 8), rel=1e-10)

    def test_non_pd_raises(self):
        with pytest.raises(NumericalFailureError):
            log_likelihood(-np.eye(2), np.eye(2), 3)


class TestStateMaintenance:
    def test_validate_catches_stale_inverse(self):
        state, _, _ = make_state(2, 2)
        state.sigma = 2.0 * np.eye(4)
        with pytest.raises(NumericalFailureError):
            state.validate()
        state.refresh_inverse()
        state.validate()

    def test_refresh_rejects_non_pd(self):
        state, _, _ = make_state(2, 1)
        state.theta = np.array([[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(NumericalFailureError):
            state.refresh_inverse()


class TestMcmcConfig:
    def test_stored_counts(self):
        assert McmcConfig(iterations=1100, burn_in=1000, thin=1).n_stored == 100
        assert McmcConfig(iterations=2000, burn_in=1000, thin=2).n_stored == 500
        assert McmcConfig().n_stored == 10000  # paper-style default run length

    def test_invalid_configs(self):
        with pytest.raises(ValueError):
            McmcConfig(iterations=10, burn_in=10)
        with pytest.raises(ValueError):
            McmcConfig(iterations=10, burn_in=-1)
        with pytest.raises(ValueError):
            McmcConfig(thin=0)
