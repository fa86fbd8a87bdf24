"""Cross-validated accuracy of Quipus and single-network HLNB-BC on the bundled datasets.

    python scripts/reproduce_results.py --reps 10 --out results/
"""

import argparse
import json
from pathlib import Path

from quipus.dataset import load_csv
from quipus.harness import ExperimentConfig, export_report, run_cv

DATA = Path(__file__).resolve().parent.parent / "data"

# dataset -> (k, epsilon percentile, b, alpha)
SETTINGS = {
    "iris": (12, 0.0, 3, 1.0),
    "wine": (7, 0.0, 3, 1.0),
    "zoo": (1, 0.0, 1, 1.0),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--datasets", nargs="+", default=list(SETTINGS), choices=list(SETTINGS))
    ap.add_argument("--reps", type=int, default=10)
    ap.add_argument("--folds", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--baseline-k", default="1:10", help="k range tuned for the baseline")
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    lo, hi = map(int, args.baseline_k.split(":"))
    rows = []
    for name in args.datasets:
        ds = load_csv(DATA / f"{name}.csv", drop_columns=["name"] if name == "zoo" else ())
        k, eps, b, alpha = SETTINGS[name]
        common = dict(epsilon_percentile=(eps,), b=(b,), alpha=(alpha,), repetitions=args.reps,
                      folds=args.folds, seed=args.seed, jobs=args.jobs)
        q = run_cv(ExperimentConfig(k=(k,), **common), ds)
        base = max((run_cv(ExperimentConfig(mode="baseline", k=(kb,), **common), ds)
                    for kb in range(lo, hi + 1)), key=lambda r: r.mean)
        rows.append({"dataset": name, "quipus_mean": q.mean, "quipus_std": q.std,
                     "baseline_mean": base.mean, "baseline_std": base.std,
                     "baseline_k": base.params["k"]})
        print(f"{name:5s} quipus {100 * q.mean:6.2f} +- {100 * q.std:5.2f}   "
              f"baseline {100 * base.mean:6.2f} +- {100 * base.std:5.2f} (k={base.params['k']})",
              flush=True)
        if args.out:
            export_report(q, args.out / name / "quipus")
            export_report(base, args.out / name / "baseline", graphs=False)
    if args.out:
        (args.out / "summary.json").write_text(json.dumps(rows, indent=2))


if __name__ == "__main__":
    main()
