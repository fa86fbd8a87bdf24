"""Per-network modularity, filter decision and fitted weight for one training split."""

import argparse
from pathlib import Path

import numpy as np

from quipus.dataset import load_csv, stratified_split
from quipus.ensemble import train
from quipus.hlnb import HlnbParams
from quipus.netbuild import BuildParams
from quipus.pso import PsoParams

DATA = Path(__file__).resolve().parent.parent / "data"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dataset", default="wine", choices=["iris", "wine", "zoo"])
    ap.add_argument("--k", type=int, default=7)
    ap.add_argument("--b", type=int, default=3)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    ds = load_csv(DATA / f"{args.dataset}.csv",
                  drop_columns=["name"] if args.dataset == "zoo" else ())
    training = stratified_split(ds, 0.9, args.seed).first
    model = train(training, BuildParams(k=args.k), HlnbParams(args.b, args.alpha),
                  PsoParams(seed=args.seed), seed=args.seed)
    q = model.metadata["net_modularities"]
    active = model.bundle.active
    weights = dict(zip(np.flatnonzero(active).tolist(), model.weights.tolist()))
    print(f"{'network':28s} {'Q':>8s}  {'weight':>8s}")
    for i, name in enumerate(("instance",) + training.attribute_names):
        w = f"{weights[i]:8.4f}" if active[i] else "ignored"
        qs = "nan" if q[i] is None or np.isnan(q[i]) else f"{q[i]:.4f}"
        print(f"{name:28s} {qs:>8s}  {w:>8s}")
    print(f"accuracy on the optimization split: {model.metadata['opt_accuracy']:.4f}")


if __name__ == "__main__":
    main()
