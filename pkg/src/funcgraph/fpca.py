"""Functional PCA for densely observed curves on a common grid.

Curves are mean-centered per node, the T x T sample covariance is
eigendecomposed, and scores are obtained by Riemann-quadrature projection
onto the leading eigenfunctions. One truncation level is shared across
nodes: the smallest M whose leading-M eigenvalue fraction meets the
variance threshold at every node.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError, RankDeficiencyError, UnsupportedDesignError

#: Tolerance for grid orthonormality / energy accounting checks.
ORTHO_TOL = 1e-8


@dataclass
class FunctionalDataset:
    """Ragged per-subject, per-node observations (time, value).

    ``times[i][j]`` and ``values[i][j]`` are 1-d arrays for subject ``i``,
    node ``j``. All times lie in [0, 1]. In a dense design every series
    shares one common grid.
    """

    n_subjects: int
    n_nodes: int
    times: list = field(repr=False)
    values: list = field(repr=False)
    design: str = "dense"

    def __post_init__(self):
        if self.n_subjects < 1 or self.n_nodes < 1:
            raise ValueError("dataset needs at least one subject and one node")
        if self.design not in ("dense", "sparse"):
            raise ValueError(f"unknown design {self.design!r}")
        for i in range(self.n_subjects):
            for j in range(self.n_nodes):
                t = np.asarray(self.times[i][j], dtype=float)
                if t.size and (t.min() < 0.0 or t.max() > 1.0):
                    raise ValueError(f"times outside [0, 1] for subject {i}, node {j}")
                if t.size != np.asarray(self.values[i][j]).size:
                    raise ValueError(f"time/value length mismatch for subject {i}, node {j}")

    @classmethod
    def from_dense_array(cls, grid, values):
        """Build a dense dataset from a common grid (T,) and values (N, p, T)."""
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        n, p, t = values.shape
        if grid.shape != (t,):
            raise ValueError("grid length does not match value arrays")
        times = [[grid for _ in range(p)] for _ in range(n)]
        vals = [[values[i, j] for j in range(p)] for i in range(n)]
        return cls(n_subjects=n, n_nodes=p, times=times, values=vals, design="dense")

    def common_grid(self):
        """Return the shared dense grid, verifying every series uses it."""
        if self.design != "dense":
            raise UnsupportedDesignError("no common grid in a sparse design")
        grid = np.asarray(self.times[0][0], dtype=float)
        for i in range(self.n_subjects):
            for j in range(self.n_nodes):
                t = np.asarray(self.times[i][j], dtype=float)
                if t.shape != grid.shape or not np.array_equal(t, grid):
                    raise UnsupportedDesignError(
                        f"subject {i}, node {j} is not on the common grid"
                    )
        return grid

    def dense_values(self):
        """Return values as an (N, p, T) array (dense designs only)."""
        grid = self.common_grid()
        out = np.empty((self.n_subjects, self.n_nodes, grid.size))
        for i in range(self.n_subjects):
            for j in range(self.n_nodes):
                out[i, j] = np.asarray(self.values[i][j], dtype=float)
        return out


@dataclass
class FpcaBasis:
    """Per-node eigensystem of the sample covariance on the grid.

    ``eigenfunctions[j, k]`` holds the k-th eigenfunction of node j on the
    grid, orthonormal under quadrature weights dt = 1/(T-1).
    ``eigenvalues[j]`` is the full descending spectrum of node j's sample
    covariance matrix; only the leading ``truncation`` components carry
    eigenfunctions.
    """

    grid: np.ndarray
    eigenfunctions: np.ndarray  # (p, M, T)
    eigenvalues: np.ndarray  # (p, T), descending
    truncation: int

    def __post_init__(self):
        if self.truncation < 1:
            raise ValueError("truncation must be at least 1")

    @property
    def dt(self):
        return 1.0 / (self.grid.size - 1)


@dataclass
class ScoreMatrix:
    """N x (p*M) matrix of truncated scores; column c = node*M + k."""

    values: np.ndarray
    n_nodes: int
    truncation: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("scores must be a 2-d matrix")
        if self.values.shape[1] != self.n_nodes * self.truncation:
            raise ValueError("column count must equal n_nodes * truncation")

    @property
    def n_subjects(self):
        return self.values.shape[0]

    def column_index(self, node, k):
        return node * self.truncation + k

    def node_block(self, node):
        m = self.truncation
        return self.values[:, node * m : (node + 1) * m]


def select_truncation(eigenvalues, threshold):
    """Smallest M whose leading-M eigenvalue fraction reaches ``threshold``."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must lie in (0, 1]")
    lam = np.asarray(eigenvalues, dtype=float)
    if np.any(lam < 0.0):
        raise ValueError("eigenvalues must be nonnegative")
    total = lam.sum()
    if lam.size == 0 or total <= 0.0:
        raise RankDeficiencyError("eigenvalue sequence has no positive mass")
    frac = np.cumsum(lam) / total
    # float roundoff can leave the final cumulative fraction just below 1
    frac[-1] = max(frac[-1], 1.0)
    return int(np.searchsorted(frac, threshold) + 1)


def _fix_signs(vectors):
    """Force each eigenvector's largest-magnitude entry positive (in place).

    Ties resolve to the lowest index via argmax.
    """
    idx = np.argmax(np.abs(vectors), axis=0)
    flip = vectors[idx, np.arange(vectors.shape[1])] < 0
    vectors[:, flip] *= -1.0
    return vectors


def estimate_scores_dense(data, var_threshold=0.95):
    """Estimate truncated scores for a dense dataset.

    Returns ``(ScoreMatrix, FpcaBasis)``. The truncation level is shared:
    the minimal M meeting ``var_threshold`` at every node.
    """
    if data.design != "dense":
        raise UnsupportedDesignError("score estimation requires a dense design")
    if data.n_subjects < 2:
        raise InsufficientDataError("need at least two subjects to estimate covariance")
    grid = data.common_grid()
    if grid.size < 2:
        raise ValueError("dense grid needs at least two points")
    curves = data.dense_values()  # (N, p, T)
    n, p, t = curves.shape
    dt = 1.0 / (t - 1)

    centered = curves - curves.mean(axis=0, keepdims=True)
    spectra = np.empty((p, t))
    vectors = np.empty((p, t, t))
    for j in range(p):
        cov = centered[:, j, :].T @ centered[:, j, :] / (n - 1)
        lam, vec = np.linalg.eigh(cov)
        order = np.argsort(lam)[::-1]
        spectra[j] = np.maximum(lam[order], 0.0)
        vectors[j] = _fix_signs(vec[:, order])

    m = max(select_truncation(spectra[j], var_threshold) for j in range(p))

    # quadrature-orthonormal eigenfunctions: phi = v / sqrt(dt)
    eigenfunctions = np.transpose(vectors[:, :, :m], (0, 2, 1)) / np.sqrt(dt)
    scores = np.empty((n, p * m))
    for j in range(p):
        scores[:, j * m : (j + 1) * m] = dt * centered[:, j, :] @ eigenfunctions[j].T

    basis = FpcaBasis(grid=grid, eigenfunctions=eigenfunctions, eigenvalues=spectra, truncation=m)
    return ScoreMatrix(values=scores, n_nodes=p, truncation=m), basis


def reconstruct(scores, basis):
    """Fitted (centered) curves sum_k a_ijk phi_jk(t); shape (N, p, T)."""
    p, m = scores.n_nodes, scores.truncation
    if basis.eigenfunctions.shape[:2] != (p, m):
        raise ValueError("basis dimensions do not match the score matrix")
    out = np.empty((scores.n_subjects, p, basis.grid.size))
    for j in range(p):
        out[:, j, :] = scores.node_block(j) @ basis.eigenfunctions[j]
    return out
