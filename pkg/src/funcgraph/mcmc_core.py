"""Shared sampler infrastructure.

Random variate primitives, the block-precision state with its maintained
inverse, the column partition bookkeeping used by both samplers, the shared
column conditional update, and the Gaussian log-likelihood diagnostic.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular

from .errors import NumericalFailureError

#: Maintained-inverse drift tolerance, max |theta @ sigma - I|.
INVERSE_TOL = 1e-6
#: One-shot diagonal jitter applied when the column precision fails Cholesky.
COLUMN_JITTER = 1e-10


def _validate_positive(**params):
    for name, value in params.items():
        arr = np.asarray(value, dtype=float)
        if arr.size == 0 or not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
            raise ValueError(f"{name} must be finite and strictly positive")


def draw_inverse_gaussian(mean, shape, rng, size=None):
    """Inverse-Gaussian draw(s) via the Michael-Schucany-Haas transform."""
    _validate_positive(mean=mean, shape=shape)
    mean = np.asarray(mean, dtype=float)
    shape = np.asarray(shape, dtype=float)
    if size is None:
        size = np.broadcast(mean, shape).shape
    y = rng.standard_normal(size) ** 2
    w = mean * y
    x = mean + (mean / (2.0 * shape)) * (w - np.sqrt(w * (4.0 * shape + w)))
    # roundoff at the small-root tail can produce a tiny negative value
    x = np.maximum(x, 1e-16 * mean)
    u = rng.uniform(size=size)
    out = np.where(u <= mean / (mean + x), x, mean**2 / x)
    return float(out) if out.ndim == 0 else out


def draw_gamma(shape, rate, rng, size=None):
    """Gamma draw(s) with density proportional to x^(shape-1) exp(-rate*x)."""
    _validate_positive(shape=shape, rate=rate)
    out = rng.gamma(shape, 1.0 / np.asarray(rate, dtype=float), size=size)
    return float(out) if np.ndim(out) == 0 else out


def draw_inverse_gamma(shape, scale, rng, size=None):
    """Inverse-gamma draw(s) with density proportional to x^(-shape-1) exp(-scale/x)."""
    _validate_positive(shape=shape, scale=scale)
    out = 1.0 / rng.gamma(shape, 1.0 / np.asarray(scale, dtype=float), size=size)
    return float(out) if np.ndim(out) == 0 else out


def draw_mvn(mean, cov, rng):
    """One multivariate normal draw, mean + L z with L L' = cov."""
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError("covariance is not positive definite") from exc
    return mean + chol @ rng.standard_normal(mean.size)


@dataclass
class ScatterMatrix:
    """Sum of outer products of score vectors, with the sample count."""

    matrix: np.ndarray
    n: int

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        d = self.matrix.shape[0]
        if self.matrix.shape != (d, d):
            raise ValueError("scatter matrix must be square")

    @classmethod
    def from_scores(cls, scores):
        """Build S = scores' scores from a ScoreMatrix or raw (n, d) array."""
        values = getattr(scores, "values", scores)
        values = np.asarray(values, dtype=float)
        return cls(matrix=values.T @ values, n=values.shape[0])


class BlockPrecisionState:
    """Symmetric PD precision with node-block structure and its inverse.

    Within-node off-diagonal entries are structurally zero. ``sigma`` is the
    maintained inverse, patched after each column update and refreshed by a
    full inversion once per sweep.
    """

    def __init__(self, theta, sigma, n_nodes, block_size):
        self.theta = np.asarray(theta, dtype=float)
        self.sigma = np.asarray(sigma, dtype=float)
        self.n_nodes = n_nodes
        self.block_size = block_size
        d = n_nodes * block_size
        if self.theta.shape != (d, d) or self.sigma.shape != (d, d):
            raise ValueError("state matrices must be pM x pM")

    @classmethod
    def identity(cls, n_nodes, block_size):
        d = n_nodes * block_size
        return cls(np.eye(d), np.eye(d), n_nodes, block_size)

    @property
    def dim(self):
        return self.n_nodes * self.block_size

    def node_of(self, c):
        return c // self.block_size

    def structural_zero_mask(self):
        node = np.arange(self.dim) // self.block_size
        same = node[:, None] == node[None, :]
        return same & ~np.eye(self.dim, dtype=bool)

    def refresh_inverse(self, tol=INVERSE_TOL):
        """Recompute sigma by full inversion and bound the residual."""
        try:
            upper = cholesky(self.theta, lower=False, check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailureError("precision lost positive definiteness") from exc
        sigma = cho_solve((upper, False), np.eye(self.dim), check_finite=False)
        self.sigma = (sigma + sigma.T) / 2.0
        residual = np.abs(self.theta @ self.sigma - np.eye(self.dim)).max()
        if residual > tol:
            raise NumericalFailureError(f"inverse residual {residual:.2e} exceeds {tol:.0e}")

    def validate(self, symmetry_tol=1e-10, inverse_tol=INVERSE_TOL):
        if np.abs(self.theta - self.theta.T).max() > symmetry_tol:
            raise NumericalFailureError("precision is not symmetric")
        if np.any(self.theta[self.structural_zero_mask()] != 0.0):
            raise NumericalFailureError("structural zeros violated")
        try:
            np.linalg.cholesky(self.theta)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailureError("precision is not positive definite") from exc
        residual = np.abs(self.theta @ self.sigma - np.eye(self.dim)).max()
        if residual > inverse_tol:
            raise NumericalFailureError(f"maintained inverse off by {residual:.2e}")


@dataclass
class ColumnPartition:
    """Index bookkeeping for one column update.

    ``free`` holds the M(p-1) cross-node positions, ``zero`` the M-1
    within-node structural zeros; ``s_free`` and ``s_diag`` are the matching
    views of the scatter matrix.
    """

    column: int
    free: np.ndarray
    zero: np.ndarray
    s_free: np.ndarray
    s_diag: float
    others: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.free.size + self.zero.size + 1 != self.others.size + 1:
            raise ValueError("partition does not cover the index range")


def partition_column(state, scatter, c):
    """Split indices for column ``c`` into cross-node and structural-zero sets."""
    d = state.dim
    if not 0 <= c < d:
        raise IndexError(f"column {c} outside 0..{d - 1}")
    node = state.node_of(c)
    m = state.block_size
    idx = np.arange(d)
    in_node = (idx // m) == node
    free = idx[~in_node]
    zero = idx[in_node & (idx != c)]
    others = idx[idx != c]
    return ColumnPartition(
        column=c,
        free=free,
        zero=zero,
        s_free=scatter.matrix[free, c],
        s_diag=float(scatter.matrix[c, c]),
        others=others,
    )


def _drop_node_block(w, lo, hi):
    """Submatrix of ``w`` with the contiguous index block [lo, hi) removed."""
    d = w.shape[0]
    k = d - (hi - lo)
    out = np.empty((k, k))
    out[:lo, :lo] = w[:lo, :lo]
    out[:lo, lo:] = w[:lo, hi:]
    out[lo:, :lo] = w[hi:, :lo]
    out[lo:, lo:] = w[hi:, hi:]
    return out


def free_block_inverse(state, part):
    """Cross-node submatrix of inv(Theta_11) for the partition's column.

    Theta_11 is the precision with the target row/column deleted; its
    inverse is read off the maintained full inverse by a rank-one Schur
    downdate, then restricted to the free index set.
    """
    c = part.column
    sigma = state.sigma
    col = sigma[:, c]
    w = sigma - np.outer(col, col) / sigma[c, c]
    node = state.node_of(c)
    lo, hi = node * state.block_size, (node + 1) * state.block_size
    return w, _drop_node_block(w, lo, hi)


def _column_chol(prec, column):
    """Cholesky of the column precision, with a one-shot jitter retry."""
    try:
        return cholesky(prec, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        pass
    try:
        return cholesky(prec + COLUMN_JITTER * np.eye(prec.shape[0]), lower=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(
            f"column precision not positive definite at column {column}", column=column
        ) from exc


def column_gamma_params(n, s_diag, rate_extra):
    """Shape and rate of the column's gamma draw."""
    return 0.5 * n + 1.0, 0.5 * (s_diag + rate_extra)


def update_column(state, part, d_prior, rate_extra, n, rng):
    """Draw (beta, gamma) for one column and write them back into the state.

    ``d_prior`` is the positive prior-variance diagonal over the free set;
    ``rate_extra`` is the extra rate added to s_22 (the fixed diagonal-prior
    rate or the lasso penalty). The maintained inverse is patched via the
    matching rank-one identities.
    """
    d_prior = np.asarray(d_prior, dtype=float)
    if d_prior.shape != (part.free.size,):
        raise ValueError("d_prior length must match the free index set")
    if d_prior.size and (not np.all(np.isfinite(d_prior)) or np.any(d_prior <= 0.0)):
        raise ValueError("d_prior entries must be finite and positive")
    if rate_extra < 0.0:
        raise ValueError("rate_extra must be nonnegative")

    c = part.column
    w, w_ff = free_block_inverse(state, part)
    a = part.s_diag + rate_extra

    shape, rate = column_gamma_params(n, part.s_diag, rate_extra)
    gamma = draw_gamma(shape, rate, rng)

    k = part.free.size
    if k:
        prec = a * w_ff
        prec[np.diag_indices_from(prec)] += 1.0 / d_prior
        chol = _column_chol(prec, c)
        mean = -cho_solve((chol, True), part.s_free, check_finite=False)
        noise = solve_triangular(
            chol, rng.standard_normal(k), lower=True, trans="T", check_finite=False
        )
        beta = mean + noise
        quad = beta @ w_ff @ beta
    else:
        beta = np.empty(0)
        quad = 0.0

    theta = state.theta
    col = np.zeros(state.dim)
    col[part.free] = beta
    theta[:, c] = col
    theta[c, :] = col
    theta[c, c] = gamma + quad

    # rank-one refresh of the maintained inverse; w has zero row/column at c
    node = state.node_of(c)
    lo, hi = node * state.block_size, (node + 1) * state.block_size
    if k:
        u = w[:, :lo] @ beta[:lo] + w[:, hi:] @ beta[lo:]
    else:
        u = np.zeros(state.dim)
    sigma = w + np.outer(u, u) / gamma
    sigma[:, c] = -u / gamma
    sigma[c, :] = -u / gamma
    sigma[c, c] = 1.0 / gamma
    state.sigma = sigma
    return beta, gamma


def log_likelihood(theta, scatter_matrix, n):
    """Average Gaussian log-likelihood term: log det(theta) - tr(S theta)/n."""
    theta = np.asarray(theta, dtype=float)
    s = np.asarray(getattr(scatter_matrix, "matrix", scatter_matrix), dtype=float)
    try:
        chol = np.linalg.cholesky(theta)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError("theta is not positive definite") from exc
    logdet = 2.0 * np.log(np.diag(chol)).sum()
    return float(logdet - np.einsum("ij,ji->", s, theta) / n)


@dataclass
class McmcConfig:
    """Run length and storage settings shared by both samplers."""

    iterations: int = 11000
    burn_in: int = 1000
    thin: int = 1
    seed: int = 0
    max_store_bytes: int = 1 << 30

    def __post_init__(self):
        if self.burn_in < 0 or self.iterations <= self.burn_in:
            raise ValueError("need iterations > burn_in >= 0")
        if self.thin < 1:
            raise ValueError("thin must be at least 1")

    @property
    def n_stored(self):
        return (self.iterations - self.burn_in) // self.thin

    def keeps(self, t):
        """Whether 1-based sweep ``t`` is stored."""
        return t > self.burn_in and (t - self.burn_in) % self.thin == 0
