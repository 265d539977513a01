"""Sparse conditional-dependence graphs from multivariate functional data.

Two block Gibbs samplers over node-block precision matrices of truncated
functional principal component scores: a functional graphical lasso (fixed
or gamma-hyperprior penalty) and a functional graphical horseshoe.
"""

from .config import ExperimentConfig, IngestSpec, SimulateSpec, load_config
from .errors import FuncgraphError
from .experiment import benchmark, run_experiment
from .fghs import fghs_init, fghs_run, fghs_sweep
from .fglasso import fglasso_init, fglasso_run, fglasso_sweep
from .fpca import (
    FpcaBasis,
    FunctionalDataset,
    ScoreMatrix,
    estimate_scores_dense,
    reconstruct,
    select_truncation,
)
from .mcmc_core import (
    BlockPrecisionState,
    McmcConfig,
    ScatterMatrix,
    draw_gamma,
    draw_inverse_gamma,
    draw_inverse_gaussian,
    draw_mvn,
    log_likelihood,
    partition_column,
    update_column,
)
from .metrics import ConfusionSummary, confusion, grouped_mse, roc_auc, roc_curve, roc_sweep
from .netgen import (
    SamplingDesign,
    TruePrecision,
    network1,
    network2,
    render_functions,
    simulate_scores,
    true_edges,
)
from .posterior import (
    Chain,
    EdgeGraph,
    block_frobenius,
    credible_intervals,
    posterior_mean,
    threshold_graph,
)

__version__ = "0.1.0"

__all__ = [
    "BlockPrecisionState",
    "Chain",
    "ConfusionSummary",
    "EdgeGraph",
    "ExperimentConfig",
    "FpcaBasis",
    "FuncgraphError",
    "FunctionalDataset",
    "IngestSpec",
    "McmcConfig",
    "SamplingDesign",
    "ScatterMatrix",
    "ScoreMatrix",
    "SimulateSpec",
    "TruePrecision",
    "benchmark",
    "block_frobenius",
    "confusion",
    "credible_intervals",
    "draw_gamma",
    "draw_inverse_gamma",
    "draw_inverse_gaussian",
    "draw_mvn",
    "estimate_scores_dense",
    "fghs_init",
    "fghs_run",
    "fghs_sweep",
    "fglasso_init",
    "fglasso_run",
    "fglasso_sweep",
    "grouped_mse",
    "load_config",
    "log_likelihood",
    "network1",
    "network2",
    "partition_column",
    "posterior_mean",
    "reconstruct",
    "render_functions",
    "roc_auc",
    "roc_curve",
    "roc_sweep",
    "run_experiment",
    "select_truncation",
    "simulate_scores",
    "threshold_graph",
    "true_edges",
    "update_column",
]
