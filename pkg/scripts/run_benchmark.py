#!/usr/bin/env python3
"""Wall-time scaling of the block Gibbs samplers over graph sizes."""

import argparse

import numpy as np

from funcgraph import benchmark


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p-list", default="10,30,50")
    ap.add_argument("--iterations", type=int, default=2000)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--method", default="fglasso-fixed",
                    choices=("fghs", "fglasso-hyper", "fglasso-fixed"))
    ap.add_argument("--subjects", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="benchmark.csv")
    args = ap.parse_args()

    p_list = [int(tok) for tok in args.p_list.split(",") if tok]
    rows = benchmark(
        p_list,
        iterations=args.iterations,
        repeats=args.repeats,
        method=args.method,
        n_subjects=args.subjects,
        seed=args.seed,
        out_path=args.out,
    )
    print(f"wrote {args.out}")
    for p in p_list:
        times = [sec for q, sec in rows if q == p]
        print(f"p={p:4d}: median {np.median(times):8.2f}s over {len(times)} runs "
              f"({args.iterations} iterations, {args.method})")


if __name__ == "__main__":
    main()
