"""Cross-validated accuracy as the structural/link-count mix alpha varies."""

import argparse
from pathlib import Path

import numpy as np

from quipus.dataset import load_csv
from quipus.harness import ExperimentConfig, run_cv

DATA = Path(__file__).resolve().parent.parent / "data"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dataset", default="wine", choices=["iris", "wine", "zoo"])
    ap.add_argument("--k", type=int, default=7)
    ap.add_argument("--b", type=int, default=3)
    ap.add_argument("--alphas", type=float, nargs="+", default=np.linspace(0, 1, 5).tolist())
    ap.add_argument("--mode", default="quipus", choices=["quipus", "baseline"])
    ap.add_argument("--reps", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    ds = load_csv(DATA / f"{args.dataset}.csv",
                  drop_columns=["name"] if args.dataset == "zoo" else ())
    print("alpha,mean,std")
    for a in args.alphas:
        res = run_cv(ExperimentConfig(mode=args.mode, k=(args.k,), b=(args.b,), alpha=(a,),
                                      repetitions=args.reps, seed=args.seed), ds)
        print(f"{a:.2f},{res.mean:.4f},{res.std:.4f}", flush=True)


if __name__ == "__main__":
    main()
