import numpy as np
import pytest

from funcgraph import netgen
from funcgraph.fpca import ScoreMatrix


@pytest.fixture(scope="session")
def net1_truth():
    return netgen.network1(10)


@pytest.fixture(scope="session")
def net1_scores(net1_truth):
    """Coefficient draws from the Network-1 truth, wrapped as scores."""
    raw = netgen.simulate_scores(net1_truth, 100, seed=3)
    return ScoreMatrix(values=raw, n_nodes=10, truncation=5)


@pytest.fixture(scope="session")
def micro_scores():
    """p=2, M=1, n=50 scores from a correlated 2 x 2 truth."""
    truth = netgen.TruePrecision(
        theta=np.array([[1.0, 0.4], [0.4, 1.0]]), n_nodes=2, block_size=1
    )
    raw = netgen.simulate_scores(truth, 50, seed=11)
    return ScoreMatrix(values=raw, n_nodes=2, truncation=1)
