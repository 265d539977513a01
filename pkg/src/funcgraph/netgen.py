"""Ground-truth precision matrices and synthetic functional data.

Network 1 is block banded: identity diagonal blocks, 0.4*I on the first
off-diagonal blocks, 0.2*I on the second. Network 2 alternates decades of
ten nodes: even decades (0-based) carry the Network-1 pattern internally,
odd decades are fully isolated.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalFailureError
from .fpca import FunctionalDataset
from .posterior import EdgeGraph, block_frobenius


@dataclass
class TruePrecision:
    """pM x pM precision with w*I blocks, w in {0, 0.2, 0.4, 1}."""

    theta: np.ndarray
    n_nodes: int
    block_size: int

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        d = self.n_nodes * self.block_size
        if self.theta.shape != (d, d):
            raise ValueError("matrix shape does not match n_nodes * block_size")
        if not np.array_equal(self.theta, self.theta.T):
            raise ValueError("precision matrix must be symmetric")
        try:
            np.linalg.cholesky(self.theta)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailureError("precision matrix is not positive definite") from exc

    @property
    def dim(self):
        return self.n_nodes * self.block_size

    def block(self, i, j):
        m = self.block_size
        return self.theta[i * m : (i + 1) * m, j * m : (j + 1) * m]


@dataclass
class SamplingDesign:
    """Observation scheme for rendering curves from scores."""

    kind: str
    n_points: int
    noise_sd: float = 0.5

    def __post_init__(self):
        if self.kind not in ("dense", "sparse"):
            raise ValueError(f"unknown design kind {self.kind!r}")
        if self.n_points < 1:
            raise ValueError("n_points must be positive")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be nonnegative")

    @classmethod
    def dense(cls, n_points=100, noise_sd=0.5):
        return cls(kind="dense", n_points=n_points, noise_sd=noise_sd)

    @classmethod
    def sparse(cls, n_points=9, noise_sd=0.5):
        return cls(kind="sparse", n_points=n_points, noise_sd=noise_sd)


def _banded_weights(p):
    """p x p node-level weights of the Network-1 band."""
    w = np.eye(p)
    for j in range(1, p):
        w[j, j - 1] = w[j - 1, j] = 0.4
    for j in range(2, p):
        w[j, j - 2] = w[j - 2, j] = 0.2
    return w


def network1(p, block_size=5):
    """Block banded truth: neighbors at 0.4, second neighbors at 0.2."""
    if p < 1:
        raise ValueError("p must be at least 1")
    theta = np.kron(_banded_weights(p), np.eye(block_size))
    return TruePrecision(theta=theta, n_nodes=p, block_size=block_size)


def network2(p, block_size=5):
    """Alternating decades: even decades banded as Network 1, odd isolated."""
    if p < 1:
        raise ValueError("p must be at least 1")
    weights = np.eye(p)
    for j in range(p):
        decade = j // 10
        if decade % 2 == 1:
            continue
        for lag, w in ((1, 0.4), (2, 0.2)):
            i = j - lag
            if i >= 0 and i // 10 == decade:
                weights[j, i] = weights[i, j] = w
    theta = np.kron(weights, np.eye(block_size))
    return TruePrecision(theta=theta, n_nodes=p, block_size=block_size)


def true_edges(truth):
    """Edges where the node-pair block has a nonzero Frobenius norm."""
    weights = block_frobenius(truth.theta, truth.block_size)
    edges = {}
    for i in range(truth.n_nodes):
        for j in range(i + 1, truth.n_nodes):
            if weights[i, j] > 0.0:
                edges[(i, j)] = weights[i, j]
    return EdgeGraph(n_nodes=truth.n_nodes, edges=edges)


def simulate_scores(truth, n, seed):
    """n i.i.d. draws from N(0, theta^{-1}) via Cholesky; (n, pM) array."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    d = truth.dim
    if n == 0:
        return np.empty((0, d))
    cov = np.linalg.inv(truth.theta)
    cov = (cov + cov.T) / 2.0
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError("covariance is not positive definite") from exc
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, d)) @ chol.T


def fourier_basis(t):
    """First five orthonormal Fourier functions on [0, 1]; shape (5, len(t))."""
    t = np.asarray(t, dtype=float)
    root2 = np.sqrt(2.0)
    return np.stack(
        [
            np.ones_like(t),
            root2 * np.sin(2 * np.pi * t),
            root2 * np.cos(2 * np.pi * t),
            root2 * np.sin(4 * np.pi * t),
            root2 * np.cos(4 * np.pi * t),
        ]
    )


def render_functions(scores, design, seed):
    """Observe g_ij(t) = basis(t)' delta_ij with additive Gaussian noise.

    ``scores`` is an (n, 5p) coefficient matrix. Dense designs share one
    equispaced grid including both endpoints; sparse designs draw sorted
    uniform times per series. Every (subject, node) series uses its own
    deterministic RNG substream, so generation is order-independent.
    """
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 2 or scores.shape[1] % 5 != 0:
        raise ValueError("score column count must be divisible by 5")
    n, p = scores.shape[0], scores.shape[1] // 5
    times = [[None] * p for _ in range(n)]
    values = [[None] * p for _ in range(n)]
    grid = np.linspace(0.0, 1.0, design.n_points) if design.kind == "dense" else None
    for i in range(n):
        for j in range(p):
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i, j)))
            t = grid if grid is not None else np.sort(rng.uniform(0.0, 1.0, design.n_points))
            g = fourier_basis(t).T @ scores[i, 5 * j : 5 * (j + 1)]
            if design.noise_sd > 0:
                g = g + design.noise_sd * rng.standard_normal(t.size)
            times[i][j] = t
            values[i][j] = g
    return FunctionalDataset(
        n_subjects=n, n_nodes=p, times=times, values=values, design=design.kind
    )
