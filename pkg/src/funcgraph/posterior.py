"""Chain summaries: point estimates, credible intervals, graph selection."""

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalFailureError


@dataclass
class EdgeGraph:
    """Weighted undirected graph over ``n_nodes`` nodes (0-based labels).

    Edges are keyed by (i, j) with i < j; weights are strictly positive.
    """

    n_nodes: int
    edges: dict = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for (i, j), w in self.edges.items():
            if i == j:
                raise ValueError("self-loops are not allowed")
            if not 0 <= i < self.n_nodes or not 0 <= j < self.n_nodes:
                raise ValueError(f"edge ({i}, {j}) outside node range")
            if w <= 0:
                raise ValueError(f"edge ({i}, {j}) has nonpositive weight")
            key = (i, j) if i < j else (j, i)
            cleaned[key] = float(w)
        self.edges = cleaned

    @classmethod
    def empty(cls, n_nodes):
        return cls(n_nodes=n_nodes, edges={})

    def edge_set(self):
        return set(self.edges)

    def sorted_edges(self):
        return sorted(self.edges.items())

    def n_edges(self):
        return len(self.edges)

    def has_edge(self, i, j):
        key = (i, j) if i < j else (j, i)
        return key in self.edges

    def weight(self, i, j):
        key = (i, j) if i < j else (j, i)
        return self.edges[key]


@dataclass
class Chain:
    """Stored MCMC output: precision samples plus auxiliary traces."""

    samples: np.ndarray  # (L, pM, pM)
    n_nodes: int
    block_size: int
    n_data: int
    method: str
    seed: int
    aux: dict = field(default_factory=dict)
    config_echo: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 3 or self.samples.shape[0] < 1:
            raise ValueError("chain needs at least one stored sample")
        d = self.n_nodes * self.block_size
        if self.samples.shape[1:] != (d, d):
            raise ValueError("sample dimension does not match n_nodes * block_size")

    def __len__(self):
        return self.samples.shape[0]

    def structural_zero_mask(self):
        """Boolean (pM, pM) mask of within-node off-diagonal positions."""
        d = self.n_nodes * self.block_size
        node = np.arange(d) // self.block_size
        same_node = node[:, None] == node[None, :]
        return same_node & ~np.eye(d, dtype=bool)

    def validate(self):
        """Check symmetry (exact), structural zeros (exact), and PD of all samples."""
        mask = self.structural_zero_mask()
        for idx, s in enumerate(self.samples):
            if not np.array_equal(s, s.T):
                raise NumericalFailureError(f"sample {idx} is not exactly symmetric")
            if np.any(s[mask] != 0.0):
                raise NumericalFailureError(f"sample {idx} violates structural zeros")
            try:
                np.linalg.cholesky(s)
            except np.linalg.LinAlgError as exc:
                raise NumericalFailureError(f"sample {idx} is not positive definite") from exc


def posterior_mean(chain):
    """Elementwise mean of the stored precision samples."""
    return chain.samples.mean(axis=0)


def credible_intervals(chain, level):
    """Equal-tailed elementwise intervals; returns (lo, hi) arrays.

    Quantiles use linear interpolation between order statistics.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    if len(chain) < 2:
        raise ValueError("need at least two samples for credible intervals")
    alpha = (1.0 - level) / 2.0
    lo = np.quantile(chain.samples, alpha, axis=0, method="linear")
    hi = np.quantile(chain.samples, 1.0 - alpha, axis=0, method="linear")
    return lo, hi


def threshold_graph(chain, level):
    """Zero out entries whose credible interval covers zero; read off edges.

    Returns ``(theta_thresholded, EdgeGraph)``; an edge is present when its
    block has any surviving entry, weighted by the block Frobenius norm.
    """
    lo, hi = credible_intervals(chain, level)
    mean = posterior_mean(chain)
    keep = (lo > 0.0) | (hi < 0.0)
    theta = np.where(keep, mean, 0.0)
    weights = block_frobenius(theta, chain.block_size)
    edges = {}
    for i in range(chain.n_nodes):
        for j in range(i + 1, chain.n_nodes):
            if weights[i, j] > 0.0:
                edges[(i, j)] = weights[i, j]
    return theta, EdgeGraph(n_nodes=chain.n_nodes, edges=edges)


def block_frobenius(theta, block_size):
    """p x p matrix of Frobenius norms of the M x M node blocks."""
    theta = np.asarray(theta, dtype=float)
    d = theta.shape[0]
    if theta.shape != (d, d) or d % block_size != 0:
        raise ValueError("matrix dimension must be square and divisible by block_size")
    p = d // block_size
    blocks = theta.reshape(p, block_size, p, block_size)
    return np.sqrt(np.einsum("ikjl,ikjl->ij", blocks, blocks))
