import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from funcgraph.netgen import network1, true_edges
from funcgraph.posterior import (
    Chain,
    EdgeGraph,
    block_frobenius,
    credible_intervals,
    posterior_mean,
    threshold_graph,
)


def chain_from_samples(samples, p, m):
    return Chain(
        samples=np.asarray(samples, dtype=float),
        n_nodes=p,
        block_size=m,
        n_data=10,
        method="fghs",
        seed=0,
    )


def random_pd_chain(p, m, length, seed=0, scale=1.0):
    rng = np.random.default_rng(seed)
    d = p * m
    node = np.arange(d) // m
    mask = (node[:, None] == node[None, :]) & ~np.eye(d, dtype=bool)
    samples = np.empty((length, d, d))
    for idx in range(length):
        a = rng.normal(size=(d, d)) * scale
        s = a @ a.T + d * np.eye(d)
        s[mask] = 0.0
        samples[idx] = s
    return chain_from_samples(samples, p, m)


class TestPosteriorMean:
    def test_constant_chain_returns_the_sample(self):
        sample = np.array([[2.0, 0.5], [0.5, 1.0]])
        chain = chain_from_samples([sample, sample, sample], 2, 1)
        np.testing.assert_array_equal(posterior_mean(chain), sample)

    def test_two_point_average(self):
        chain = chain_from_samples([np.eye(2), 3 * np.eye(2)], 2, 1)
        np.testing.assert_array_equal(posterior_mean(chain), 2 * np.eye(2))

    def test_mean_of_pd_samples_is_pd(self):
        chain = random_pd_chain(3, 2, 40, seed=3)
        np.linalg.cholesky(posterior_mean(chain))


class TestCredibleIntervals:
    def test_constant_chain_collapses(self):
        sample = np.array([[1.0, 0.3], [0.3, 2.0]])
        chain = chain_from_samples([sample] * 5, 2, 1)
        lo, hi = credible_intervals(chain, 0.5)
        np.testing.assert_array_equal(lo, sample)
        np.testing.assert_array_equal(hi, sample)

    def test_linear_interpolation_quantiles(self):
        values = np.arange(1.0, 101.0)
        samples = np.array([[[v]] for v in values])
        chain = chain_from_samples(samples, 1, 1)
        lo, hi = credible_intervals(chain, 0.5)
        assert lo[0, 0] == pytest.approx(25.75)
        assert hi[0, 0] == pytest.approx(75.25)

    def test_singleton_chain_rejected(self):
        chain = chain_from_samples([np.eye(2)], 2, 1)
        with pytest.raises(ValueError):
            credible_intervals(chain, 0.5)

    def test_bad_level(self):
        chain = chain_from_samples([np.eye(2)] * 3, 2, 1)
        with pytest.raises(ValueError):
            credible_intervals(chain, 1.0)

    @given(seed=st.integers(0, 500))
    @settings(max_examples=25, deadline=None)
    def test_wider_level_nests_narrower(self, seed):
        chain = random_pd_chain(2, 2, 30, seed=seed)
        lo5, hi5 = credible_intervals(chain, 0.5)
        lo9, hi9 = credible_intervals(chain, 0.9)
        assert np.all(lo9 <= lo5) and np.all(hi9 >= hi5)


class TestThresholdGraph:
    def test_all_straddling_intervals_give_empty_graph(self):
        base = 5.0 * np.eye(2)
        flip = np.array([[0.0, 1.0], [1.0, 0.0]])
        samples = [base + flip, base - flip] * 10
        chain = chain_from_samples(samples, 2, 1)
        theta, graph = threshold_graph(chain, 0.5)
        assert graph.n_edges() == 0
        assert np.all(theta[~np.eye(2, dtype=bool)] == 0.0)

    def test_perfect_chain_recovers_true_edges(self):
        truth = network1(10)
        rng = np.random.default_rng(0)
        nonzero = truth.theta != 0.0
        samples = []
        for _ in range(60):
            noise = 1e-4 * rng.normal(size=truth.theta.shape)
            noise = (noise + noise.T) / 2.0
            samples.append(np.where(nonzero, truth.theta + noise, 0.0))
        chain = chain_from_samples(samples, 10, 5)
        _, graph = threshold_graph(chain, 0.5)
        assert graph.edge_set() == true_edges(truth).edge_set()

    def test_raising_level_never_adds_edges(self):
        chain = random_pd_chain(4, 2, 50, seed=9, scale=0.4)
        _, g_lo = threshold_graph(chain, 0.5)
        _, g_hi = threshold_graph(chain, 0.9)
        assert g_hi.edge_set() <= g_lo.edge_set()

    def test_diagonal_always_retained(self):
        chain = random_pd_chain(3, 2, 40, seed=5)
        theta, _ = threshold_graph(chain, 0.9)
        assert np.all(np.diag(theta) > 0.0)

    def test_edge_weight_equals_block_norm_of_threshold_estimate(self):
        chain = random_pd_chain(4, 2, 50, seed=2, scale=0.4)
        theta, graph = threshold_graph(chain, 0.5)
        weights = block_frobenius(theta, 2)
        for (i, j), w in graph.sorted_edges():
            assert w == weights[i, j]


class TestBlockFrobenius:
    def test_zero_matrix(self):
        assert np.all(block_frobenius(np.zeros((10, 10)), 5) == 0.0)

    def test_scaled_identity_block(self):
        theta = np.zeros((10, 10))
        theta[:5, 5:] = 0.4 * np.eye(5)
        theta[5:, :5] = 0.4 * np.eye(5)
        weights = block_frobenius(theta, 5)
        assert weights[0, 1] == pytest.approx(0.4 * np.sqrt(5.0))  # ~0.894

    def test_symmetric_input_symmetric_output(self):
        rng = np.random.default_rng(1)
        a = rng.normal(size=(6, 6))
        theta = a + a.T
        weights = block_frobenius(theta, 2)
        np.testing.assert_allclose(weights, weights.T)

    def test_dimension_error(self):
        with pytest.raises(ValueError):
            block_frobenius(np.zeros((7, 7)), 2)


class TestEdgeGraphAndChain:
    def test_edge_graph_rejects_self_loops_and_bad_weights(self):
        with pytest.raises(ValueError):
            EdgeGraph(n_nodes=3, edges={(1, 1): 1.0})
        with pytest.raises(ValueError):
            EdgeGraph(n_nodes=3, edges={(0, 1): 0.0})
        with pytest.raises(ValueError):
            EdgeGraph(n_nodes=2, edges={(0, 5): 1.0})

    def test_edge_graph_normalizes_key_order(self):
        graph = EdgeGraph(n_nodes=3, edges={(2, 0): 1.5})
        assert graph.has_edge(0, 2) and graph.weight(0, 2) == 1.5

    def test_chain_validate_flags_violations(self):
        good = random_pd_chain(2, 2, 5, seed=1)
        good.validate()
        bad = random_pd_chain(2, 2, 5, seed=1)
        bad.samples[2, 0, 1] = 99.0  # breaks symmetry
        with pytest.raises(Exception):
            bad.validate()
        bad2 = random_pd_chain(2, 2, 5, seed=1)
        bad2.samples[1, 0, 1] = bad2.samples[1, 1, 0] = 1.0  # structural zero slot
        with pytest.raises(Exception):
            bad2.validate()
