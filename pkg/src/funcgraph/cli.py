"""Command line interface.

Subcommands: simulate, fit, threshold, metrics, benchmark, compare.
Flags override config-file values; FUNCGRAPH_WORKERS sets the default
replication worker count.
"""

import argparse
import os
import sys

import numpy as np
import yaml

from . import io
from .config import ExperimentConfig, apply_overrides, load_config
from .errors import FuncgraphError
from .experiment import TRUE_BLOCK_SIZE, benchmark, run_experiment
from .metrics import confusion, grouped_mse
from .netgen import SamplingDesign, network1, network2, render_functions, simulate_scores, true_edges
from .posterior import threshold_graph


def _add_fit_flags(parser):
    parser.add_argument("--config", help="YAML config file")
    parser.add_argument("--method", choices=("fghs", "fglasso-hyper", "fglasso-fixed"))
    parser.add_argument("--network", type=int, choices=(1, 2))
    parser.add_argument("--nodes", type=int, dest="n_nodes")
    parser.add_argument("--subjects", type=int, dest="n_subjects")
    parser.add_argument("--design", choices=("dense", "sparse"))
    parser.add_argument("--noise-sd", type=float, dest="noise_sd")
    parser.add_argument("--points", type=int, dest="n_points")
    parser.add_argument("--ingest", dest="ingest_path", help="dataset CSV to fit instead of simulating")
    parser.add_argument("--rescale-time", action="store_const", const=True, dest="rescale_time")
    parser.add_argument("--var-threshold", type=float, dest="var_threshold")
    parser.add_argument("--iterations", type=int)
    parser.add_argument("--burn-in", type=int, dest="burn_in")
    parser.add_argument("--thin", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--level", type=float)
    parser.add_argument("--replications", type=int)
    parser.add_argument("--lambda2", type=float)
    parser.add_argument("--hyper-s", type=float, dest="hyper_s")
    parser.add_argument("--hyper-r", type=float, dest="hyper_r")
    parser.add_argument("--diag-rate", type=float, dest="diag_rate")
    parser.add_argument("--output-dir", dest="output_dir")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--no-save-chains", action="store_const", const=False, dest="save_chains")


def _cmd_simulate(args):
    maker = network1 if args.network == 1 else network2
    truth = maker(args.nodes, TRUE_BLOCK_SIZE)
    coeffs = simulate_scores(truth, args.subjects, seed=(args.seed, 1))
    n_points = args.points if args.points else (100 if args.design == "dense" else 9)
    design = SamplingDesign(kind=args.design, n_points=n_points, noise_sd=args.noise_sd)
    data = render_functions(coeffs, design, seed=(args.seed, 2))
    os.makedirs(args.out, exist_ok=True)
    io.write_dataset_csv(data, os.path.join(args.out, "dataset.csv"))
    io.export_graph(true_edges(truth), os.path.join(args.out, "true_edges.csv"), fmt="csv")
    np.savetxt(os.path.join(args.out, "theta_true.csv"), truth.theta, fmt="%.17g", delimiter=",")
    meta = {
        "network": args.network,
        "n_nodes": args.nodes,
        "n_subjects": args.subjects,
        "design": args.design,
        "noise_sd": args.noise_sd,
        "n_points": n_points,
        "seed": args.seed,
        "block_size": TRUE_BLOCK_SIZE,
    }
    with open(os.path.join(args.out, "meta.yaml"), "w") as fh:
        yaml.safe_dump(meta, fh, sort_keys=True)
    print(f"wrote dataset ({args.subjects} subjects x {args.nodes} nodes) to {args.out}")
    return 0


def _cmd_fit(args):
    config = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {
        key: getattr(args, key)
        for key in (
            "method", "network", "n_nodes", "n_subjects", "design", "noise_sd",
            "n_points", "ingest_path", "rescale_time", "var_threshold", "iterations",
            "burn_in", "thin", "seed", "level", "replications", "lambda2", "hyper_s",
            "hyper_r", "diag_rate", "output_dir", "workers", "save_chains",
        )
    }
    config = apply_overrides(config, **overrides)
    result = run_experiment(config)
    for key in sorted(result.summary):
        mean, se = result.summary[key]
        print(f"{key}: {mean:.6g} (se {se:.3g})")
    failed = [o for o in result.outcomes if o.status != "ok"]
    for o in failed:
        print(f"replication {o.replication} failed: {o.error}", file=sys.stderr)
    return 0 if result.all_ok else 1


def _cmd_threshold(args):
    chain = io.load_chain(args.chain)
    os.makedirs(args.out, exist_ok=True)
    theta, graph = threshold_graph(chain, args.level)
    np.savetxt(os.path.join(args.out, "theta_thresholded.csv"), theta, fmt="%.17g", delimiter=",")
    io.export_graph(graph, os.path.join(args.out, "edges.csv"), fmt="csv")
    if args.dot:
        io.export_graph(graph, os.path.join(args.out, "edges.dot"), fmt="dot")
    print(f"{graph.n_edges()} edges at level {args.level}")
    return 0


def _cmd_metrics(args):
    est = io.read_edges_csv(args.est, args.nodes)
    truth = io.read_edges_csv(args.truth, args.nodes)
    summary = confusion(est, truth)
    metrics = summary.as_dict()
    if args.est_theta and args.true_theta:
        theta_est = np.loadtxt(args.est_theta, delimiter=",")
        theta_true = np.loadtxt(args.true_theta, delimiter=",")
        mse = grouped_mse(theta_est, theta_true, args.block_size)
        for value, err in sorted(mse.by_value.items()):
            metrics[f"mse_{value:g}"] = err
        metrics["mse_overall"] = mse.overall
    with open(args.out, "w", newline="") as fh:
        fh.write("metric,value\n")
        for key in sorted(metrics):
            fh.write(f"{key},{metrics[key]!r}\n")
    print(f"f1 {summary.f1:.4f}  tpr {summary.tpr:.4f}  fpr {summary.fpr:.4f}")
    return 0


def _cmd_benchmark(args):
    p_list = [int(tok) for tok in args.p_list.split(",") if tok]
    rows = benchmark(
        p_list,
        iterations=args.iterations,
        repeats=args.repeats,
        method=args.method,
        lambda2=args.lambda2,
        n_subjects=args.subjects,
        seed=args.seed,
        out_path=args.out,
    )
    for p, seconds in rows:
        print(f"p={p}: {seconds:.3f}s")
    return 0


def _cmd_compare(args):
    graph_a = io.read_edges_csv(args.a, args.nodes)
    graph_b = io.read_edges_csv(args.b, args.nodes)
    io.export_graph_comparison(graph_a, graph_b, args.out)
    print(f"wrote comparison table to {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="funcgraph")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a synthetic dataset CSV plus its truth")
    sim.add_argument("--network", type=int, choices=(1, 2), default=1)
    sim.add_argument("--nodes", type=int, default=10)
    sim.add_argument("--subjects", type=int, default=100)
    sim.add_argument("--design", choices=("dense", "sparse"), default="dense")
    sim.add_argument("--noise-sd", type=float, default=0.5)
    sim.add_argument("--points", type=int)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=_cmd_simulate)

    fit = sub.add_parser("fit", help="run the full pipeline with replications")
    _add_fit_flags(fit)
    fit.set_defaults(func=_cmd_fit)

    thr = sub.add_parser("threshold", help="select a graph from a stored chain")
    thr.add_argument("--chain", required=True)
    thr.add_argument("--level", type=float, required=True)
    thr.add_argument("--out", required=True)
    thr.add_argument("--dot", action="store_true")
    thr.set_defaults(func=_cmd_threshold)

    met = sub.add_parser("metrics", help="confusion metrics of an edge list against truth")
    met.add_argument("--est", required=True)
    met.add_argument("--truth", required=True)
    met.add_argument("--nodes", type=int, required=True)
    met.add_argument("--out", required=True)
    met.add_argument("--est-theta", dest="est_theta")
    met.add_argument("--true-theta", dest="true_theta")
    met.add_argument("--block-size", type=int, dest="block_size", default=TRUE_BLOCK_SIZE)
    met.set_defaults(func=_cmd_metrics)

    ben = sub.add_parser("benchmark", help="sampler wall-time across node counts")
    ben.add_argument("--p-list", dest="p_list", default="10,30,50")
    ben.add_argument("--iterations", type=int, default=2000)
    ben.add_argument("--repeats", type=int, default=1)
    ben.add_argument("--method", default="fglasso-fixed",
                     choices=("fghs", "fglasso-hyper", "fglasso-fixed"))
    ben.add_argument("--lambda2", type=float, default=4.0)
    ben.add_argument("--subjects", type=int, default=100)
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument("--out", required=True)
    ben.set_defaults(func=_cmd_benchmark)

    cmp_ = sub.add_parser("compare", help="join two edge lists with membership flags")
    cmp_.add_argument("--a", required=True)
    cmp_.add_argument("--b", required=True)
    cmp_.add_argument("--nodes", type=int, required=True)
    cmp_.add_argument("--out", required=True)
    cmp_.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FuncgraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
