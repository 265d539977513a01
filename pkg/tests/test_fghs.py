import numpy as np
import pytest
from scipy import stats

from funcgraph.fghs import (
    fghs_init,
    fghs_run,
    fghs_sweep,
    global_scale_shape,
    local_scale_rate,
    local_scale_shape,
)
from funcgraph.fglasso import fglasso_run
from funcgraph.fpca import ScoreMatrix
from funcgraph.mcmc_core import McmcConfig, draw_inverse_gamma
from funcgraph.posterior import posterior_mean
from oracles import fghs_quadrature_mean, half_cauchy_cdf


def scores_for(p, m, n=60, seed=0):
    rng = np.random.default_rng(seed)
    return ScoreMatrix(values=rng.normal(size=(n, p * m)), n_nodes=p, truncation=m)


class TestInit:
    def test_initial_state_invariants(self):
        state = fghs_init(scores_for(3, 2))
        np.linalg.cholesky(state.precision.theta)
        assert state.tau2 == 1.0 and state.zeta == 1.0 and state.diag_rate == 1.0
        assert np.all(state.local == 1.0) and np.all(state.nu == 1.0)

    def test_local_matrix_is_node_by_node(self):
        state = fghs_init(scores_for(10, 5))
        assert state.local.shape == (10, 10)
        assert state.nu.shape == (10, 10)

    def test_init_consumes_no_rng(self):
        a = fghs_init(scores_for(3, 2))
        b = fghs_init(scores_for(3, 2))
        assert np.array_equal(a.precision.theta, b.precision.theta)
        assert np.array_equal(a.local, b.local)

    def test_empty_scores_rejected(self):
        empty = ScoreMatrix(values=np.empty((0, 4)), n_nodes=2, truncation=2)
        with pytest.raises(ValueError):
            fghs_init(empty)


class TestConditionalShapes:
    def test_global_scale_shape_hand_value(self):
        # (M^2 p (p-1) + 2) / 4 at (10, 5)
        assert global_scale_shape(10, 5) == 563.0

    def test_local_scale_shape_hand_value(self):
        assert local_scale_shape(5) == 13.0

    def test_zero_block_reduction(self):
        # with a vanished block and unit auxiliary the rate collapses to 1
        assert local_scale_rate(1.0, 0.0, 1.0) == 1.0
        rng = np.random.default_rng(3)
        draws = draw_inverse_gamma(13.0, 1.0, rng, size=200_000)
        assert abs(draws.mean() - 1.0 / 12.0) <= 0.02 / 12.0  # InvGamma(13,1) mean


class TestMakalicSchmidt:
    def test_half_cauchy_marginal_by_ks(self):
        # prior-only auxiliary pair, likelihood switched off (zero block)
        rng = np.random.default_rng(10)
        n = 100_000
        nu = np.ones(n)
        for _ in range(60):
            lam2 = draw_inverse_gamma(0.5, 1.0 / nu, rng)
            nu = draw_inverse_gamma(1.0, 1.0 + 1.0 / lam2, rng)
        lam = np.sqrt(lam2)
        grid = np.sort(lam)
        empirical = np.arange(1, n + 1) / n
        ks = np.abs(empirical - half_cauchy_cdf(grid)).max()
        assert ks <= 0.01
        # cross-check the analytic cdf against scipy's half-Cauchy
        x = np.linspace(0.01, 50, 200)
        np.testing.assert_allclose(half_cauchy_cdf(x), stats.halfcauchy.cdf(x), atol=1e-12)


class TestSweepAndRun:
    def test_stored_sample_count_with_thinning(self):
        chain = fghs_run(scores_for(2, 1), McmcConfig(iterations=2000, burn_in=1000, thin=2))
        assert len(chain) == 500

    def test_samples_pass_invariants(self):
        chain = fghs_run(scores_for(3, 2, seed=5), McmcConfig(iterations=300, burn_in=100, seed=2))
        chain.validate()

    def test_global_scale_trace_positive(self):
        chain = fghs_run(scores_for(2, 2, seed=1), McmcConfig(iterations=200, burn_in=50, seed=4))
        tau2 = chain.aux["tau2"]
        assert np.all(tau2 > 0.0) and np.all(np.isfinite(tau2))

    def test_determinism(self):
        cfg = McmcConfig(iterations=150, burn_in=50, seed=11)
        a = fghs_run(scores_for(3, 1, seed=4), cfg)
        b = fghs_run(scores_for(3, 1, seed=4), cfg)
        assert np.array_equal(a.samples, b.samples)

    def test_shrinkage_variables_stay_positive(self):
        state = fghs_init(scores_for(3, 2, seed=2))
        rng = np.random.default_rng(1)
        for _ in range(50):
            fghs_sweep(state, rng)
            assert state.tau2 > 0 and state.zeta > 0
            off = ~np.eye(3, dtype=bool)
            assert np.all(state.local[off] > 0) and np.all(state.nu[off] > 0)

    def test_micro_case_tracks_quadrature_oracle(self, micro_scores):
        s_mat = micro_scores.values.T @ micro_scores.values
        oracle = fghs_quadrature_mean(s_mat, 50)
        chain = fghs_run(micro_scores, McmcConfig(iterations=9000, burn_in=1000, seed=3))
        assert np.abs(posterior_mean(chain) - oracle).max() <= 0.05


class TestShrinkageAsymmetry:
    def test_horseshoe_shrinks_nulls_harder_than_lasso(self, net1_truth, net1_scores):
        cfg = McmcConfig(iterations=700, burn_in=200, seed=5)
        mean_hs = posterior_mean(fghs_run(net1_scores, cfg))
        mean_gl = posterior_mean(fglasso_run(net1_scores, cfg, hyper=(1.0, 0.01)))
        node = np.arange(50) // 5
        null_mask = (node[:, None] != node[None, :]) & (net1_truth.theta == 0.0)
        assert np.abs(mean_hs[null_mask]).mean() < np.abs(mean_gl[null_mask]).mean()
