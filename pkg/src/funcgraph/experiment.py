"""Experiment orchestration: replicated fits, summaries, and timing runs.

Each replication runs seed = root_seed + r, owns its RNG substreams and
output subdirectory, and survives failures of its siblings; the summary
reports mean and standard error across the successful replications.
"""

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import io
from .config import dump_config_yaml
from .errors import FuncgraphError, UnsupportedDesignError
from .fghs import fghs_run
from .fglasso import fglasso_run
from .fpca import ScoreMatrix, estimate_scores_dense
from .mcmc_core import McmcConfig
from .metrics import confusion, grouped_mse
from .netgen import SamplingDesign, network1, network2, render_functions, simulate_scores, true_edges
from .posterior import credible_intervals, posterior_mean, threshold_graph

TRUE_BLOCK_SIZE = 5  # simulated coefficient vectors are 5-dimensional


@dataclass
class ReplicationOutcome:
    replication: int
    status: str  # "ok" | "failed"
    error: str
    metrics: dict


@dataclass
class ExperimentResult:
    output_dir: str
    outcomes: list
    summary: dict

    @property
    def all_ok(self):
        return all(o.status == "ok" for o in self.outcomes)


def _simulated_truth(spec):
    maker = network1 if spec.network == 1 else network2
    return maker(spec.n_nodes, TRUE_BLOCK_SIZE)


def _make_dataset(config, seed):
    """Build the replication's dataset; returns (dataset, truth or None)."""
    if config.simulate is not None:
        spec = config.simulate
        truth = _simulated_truth(spec)
        coeffs = simulate_scores(truth, spec.n_subjects, seed=(seed, 1))
        design = SamplingDesign(
            kind=spec.design, n_points=spec.n_points, noise_sd=spec.noise_sd
        )
        data = render_functions(coeffs, design, seed=(seed, 2))
        return data, truth
    data = io.ingest_csv(config.ingest.path, rescale_time=config.ingest.rescale_time)
    return data, None


def _fit_chain(config, scores, seed):
    mcmc = McmcConfig(
        iterations=config.mcmc.iterations,
        burn_in=config.mcmc.burn_in,
        thin=config.mcmc.thin,
        seed=seed,
        max_store_bytes=config.mcmc.max_store_bytes,
    )
    if config.method == "fghs":
        return fghs_run(scores, mcmc, diag_rate=config.diag_rate)
    if config.method == "fglasso-hyper":
        return fglasso_run(scores, mcmc, hyper=(config.hyper_s, config.hyper_r))
    return fglasso_run(scores, mcmc, lambda2=config.lambda2)


def _write_intervals(path, lo, hi):
    with open(path, "w", newline="") as fh:
        fh.write("row,col,lo,hi\n")
        d = lo.shape[0]
        for i in range(d):
            for j in range(i, d):
                fh.write(f"{i},{j},{float(lo[i, j])!r},{float(hi[i, j])!r}\n")


def _write_metrics(path, metrics):
    with open(path, "w", newline="") as fh:
        fh.write("metric,value\n")
        for key in sorted(metrics):
            fh.write(f"{key},{metrics[key]!r}\n")


def run_replication(config, rep):
    """One end-to-end replication; artifacts land in rep_### under output_dir."""
    seed = config.mcmc.seed + rep
    rep_dir = os.path.join(config.output_dir, f"rep_{rep:03d}")
    os.makedirs(rep_dir, exist_ok=True)
    try:
        data, truth = _make_dataset(config, seed)
        if data.design != "dense":
            raise UnsupportedDesignError(
                "sparse-design estimation unsupported: scores need a dense common grid"
            )
        scores, _ = estimate_scores_dense(data, var_threshold=config.var_threshold)
        chain = _fit_chain(config, scores, seed)
        if config.save_chains:
            io.save_chain(chain, os.path.join(rep_dir, "chain.fgch"))
        lo, hi = credible_intervals(chain, config.level)
        _write_intervals(os.path.join(rep_dir, "intervals.csv"), lo, hi)
        theta_thres, graph = threshold_graph(chain, config.level)
        np.savetxt(
            os.path.join(rep_dir, "theta_thresholded.csv"),
            theta_thres,
            fmt="%.17g",
            delimiter=",",
        )
        io.export_graph(graph, os.path.join(rep_dir, "edges.csv"), fmt="csv")

        metrics = {"truncation": scores.truncation, "n_selected_edges": graph.n_edges()}
        if truth is not None:
            summary = confusion(graph, true_edges(truth))
            metrics.update(summary.as_dict())
            if scores.truncation == truth.block_size:
                mse = grouped_mse(posterior_mean(chain), truth.theta, truth.block_size)
                for value, err in sorted(mse.by_value.items()):
                    metrics[f"mse_{value:g}"] = err
                metrics["mse_overall"] = mse.overall
        _write_metrics(os.path.join(rep_dir, "metrics.csv"), metrics)
        return ReplicationOutcome(replication=rep, status="ok", error="", metrics=metrics)
    except (FuncgraphError, ValueError, OSError) as exc:
        return ReplicationOutcome(
            replication=rep, status="failed", error=f"{type(exc).__name__}: {exc}", metrics={}
        )


def _resolve_workers(config):
    env = os.environ.get("FUNCGRAPH_WORKERS")
    if config.workers > 1:
        return config.workers
    if env:
        return max(1, int(env))
    return 1


def run_experiment(config):
    """Run all replications, write per-rep artifacts plus a pooled summary."""
    os.makedirs(config.output_dir, exist_ok=True)
    dump_config_yaml(config, os.path.join(config.output_dir, "config_echo.yaml"))
    reps = list(range(config.replications))
    workers = _resolve_workers(config)
    if workers > 1 and len(reps) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_replication, [config] * len(reps), reps))
    else:
        outcomes = [run_replication(config, rep) for rep in reps]
    outcomes.sort(key=lambda o: o.replication)

    with open(os.path.join(config.output_dir, "report.csv"), "w", newline="") as fh:
        fh.write("replication,status,error\n")
        for o in outcomes:
            err = o.error.replace(",", ";")
            fh.write(f"{o.replication},{o.status},{err}\n")

    summary = {}
    ok = [o for o in outcomes if o.status == "ok"]
    if ok:
        keys = sorted(set.intersection(*(set(o.metrics) for o in ok)))
        for key in keys:
            values = np.array([float(o.metrics[key]) for o in ok])
            se = values.std(ddof=1) / np.sqrt(len(values)) if len(values) > 1 else 0.0
            summary[key] = (float(values.mean()), float(se))
    with open(os.path.join(config.output_dir, "summary.csv"), "w", newline="") as fh:
        fh.write("metric,mean,se\n")
        for key in sorted(summary):
            mean, se = summary[key]
            fh.write(f"{key},{mean!r},{se!r}\n")
    return ExperimentResult(output_dir=config.output_dir, outcomes=outcomes, summary=summary)


def benchmark(
    p_list,
    iterations=2000,
    block_size=5,
    n_subjects=100,
    repeats=1,
    method="fglasso-fixed",
    lambda2=4.0,
    seed=0,
    out_path=None,
):
    """Wall-time of full sampler runs on Network-1 scores for each node count.

    Returns rows of (p, seconds); with ``repeats`` > 1 each p gets several
    rows. Storage is thinned so timing reflects the sweeps themselves.
    """
    if not p_list:
        raise ValueError("p_list is empty")
    rows = []
    for p in p_list:
        truth = network1(p, block_size)
        coeffs = simulate_scores(truth, n_subjects, seed=(seed, p))
        scores = ScoreMatrix(values=coeffs, n_nodes=p, truncation=block_size)
        for run in range(repeats):
            mcmc = McmcConfig(
                iterations=iterations,
                burn_in=0,
                thin=max(1, iterations // 4),
                seed=seed + run,
            )
            start = time.perf_counter()
            if method == "fghs":
                fghs_run(scores, mcmc)
            elif method == "fglasso-hyper":
                fglasso_run(scores, mcmc, hyper=(1.0, 0.01))
            else:
                fglasso_run(scores, mcmc, lambda2=lambda2)
            rows.append((p, time.perf_counter() - start))
    if out_path is not None:
        with open(out_path, "w", newline="") as fh:
            fh.write("p,seconds\n")
            for p, seconds in rows:
                fh.write(f"{p},{seconds:.6f}\n")
    return rows
