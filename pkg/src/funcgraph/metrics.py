"""Structure-recovery and estimation-fidelity metrics."""

from dataclasses import dataclass

import numpy as np

from .fglasso import fglasso_run
from .mcmc_core import McmcConfig
from .posterior import threshold_graph


@dataclass
class ConfusionSummary:
    """Edge confusion counts over unordered node pairs, with derived rates."""

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    @property
    def tpr(self):
        pos = self.tp + self.fn
        return self.tp / pos if pos else 1.0

    @property
    def fpr(self):
        neg = self.fp + self.tn
        return self.fp / neg if neg else 0.0

    @property
    def fnr(self):
        pos = self.tp + self.fn
        return self.fn / pos if pos else 0.0

    @property
    def err(self):
        return (self.fp + self.fn) / self.total if self.total else 0.0

    @property
    def f1(self):
        denom = 2 * self.tp + self.fp + self.fn
        # both graphs empty: perfect agreement
        return 2 * self.tp / denom if denom else 1.0

    @property
    def sparsity(self):
        return (self.tp + self.fp) / self.total if self.total else 0.0

    def as_dict(self):
        return {
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "tpr": self.tpr,
            "fpr": self.fpr,
            "fnr": self.fnr,
            "err": self.err,
            "f1": self.f1,
            "sparsity": self.sparsity,
        }


def confusion(est, truth):
    """Confusion counts of an estimated edge set against the truth."""
    if est.n_nodes != truth.n_nodes:
        raise ValueError("graphs are over different node counts")
    p = truth.n_nodes
    est_edges = est.edge_set()
    true_edges = truth.edge_set()
    tp = len(est_edges & true_edges)
    fp = len(est_edges - true_edges)
    fn = len(true_edges - est_edges)
    tn = p * (p - 1) // 2 - tp - fp - fn
    return ConfusionSummary(tp=tp, fp=fp, tn=tn, fn=fn)


def roc_auc(points):
    """Trapezoidal area under (FPR, TPR) points, padded with (0,0) and (1,1)."""
    pts = sorted((float(f), float(t)) for f, t in points)
    if not pts:
        raise ValueError("need at least one ROC point")
    pts = [(0.0, 0.0)] + pts + [(1.0, 1.0)]
    fpr = np.array([q[0] for q in pts])
    tpr = np.array([q[1] for q in pts])
    if fpr.min() < 0 or fpr.max() > 1 or tpr.min() < 0 or tpr.max() > 1:
        raise ValueError("ROC points must lie in the unit square")
    return float(np.trapezoid(tpr, fpr))


def default_lambda_grid(n_points=20, low=0.1, high=100.0):
    """Logarithmically spaced penalty grid."""
    return np.geomspace(low, high, n_points)


def _roc_point(scores, truth, lam, level, config):
    chain = fglasso_run(scores, config=config, lambda2=lam**2)
    _, graph = threshold_graph(chain, level)
    summary = confusion(graph, truth)
    return summary.fpr, summary.tpr


def roc_curve(scores, truth, lambda_grid=None, level=0.95, config=None, n_jobs=1):
    """(FPR, TPR) per penalty value from fixed-penalty lasso fits."""
    grid = default_lambda_grid() if lambda_grid is None else np.asarray(lambda_grid, float)
    if grid.size == 0:
        raise ValueError("lambda grid is empty")
    config = config or McmcConfig()
    if n_jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            futures = [
                pool.submit(_roc_point, scores, truth, lam, level, config) for lam in grid
            ]
            return [f.result() for f in futures]
    return [_roc_point(scores, truth, lam, level, config) for lam in grid]


def roc_sweep(scores, truth, lambda_grid=None, level=0.95, config=None, n_jobs=1):
    """AUC of the fixed-penalty lasso selection swept over a penalty grid."""
    return roc_auc(roc_curve(scores, truth, lambda_grid, level, config, n_jobs))


@dataclass
class MseByGroup:
    """Squared-error summary of off-diagonal-block entries by true value."""

    by_value: dict
    overall: float


def grouped_mse(theta_hat, theta_true, block_size, groups=(0.0, 0.2, 0.4)):
    """Mean squared error over off-diagonal-block entries, split by truth."""
    theta_hat = np.asarray(theta_hat, dtype=float)
    theta_true = np.asarray(theta_true, dtype=float)
    if theta_hat.shape != theta_true.shape:
        raise ValueError("estimate and truth have different shapes")
    d = theta_true.shape[0]
    if theta_true.shape != (d, d) or d % block_size != 0:
        raise ValueError("matrices must be square with dimension divisible by block_size")
    node = np.arange(d) // block_size
    off_block = node[:, None] != node[None, :]
    sq = (theta_hat - theta_true) ** 2
    by_value = {}
    for value in groups:
        mask = off_block & (theta_true == value)
        by_value[value] = float(sq[mask].mean()) if mask.any() else float("nan")
    return MseByGroup(by_value=by_value, overall=float(sq[off_block].mean()))
