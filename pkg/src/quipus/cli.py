"""Command line entry point: ``quipus {cv,grid,train,predict,export-graphs,normalize}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import ensemble
from .dataset import load_csv, min_max_normalize, write_csv
from .graph import write_dot, write_graphml
from .harness import ExperimentConfig, export_report, run_cv, run_grid
from .pso import GRID_KEYS

# CLI flag -> config field
_FLAG_FIELDS = {
    "dataset": "dataset", "label_col": "label_column", "drop_column": "drop_columns",
    "no_header": "has_header", "mode": "mode", "k": "k", "eps": "epsilon_percentile",
    "b": "b", "alpha": "alpha", "insertion": "insertion", "metric": "metric",
    "rule": "rule", "c1": "c1", "c2": "c2", "inertia": "inertia",
    "iterations": "iterations", "swarm_size": "swarm_size",
    "opt_fraction": "opt_fraction", "reps": "repetitions", "folds": "folds",
    "seed": "seed", "normalize": "normalize", "jobs": "jobs", "out": "out",
}


def _int_values(text: str) -> list[int]:
    """``"7"`` -> [7]; ``"1:30"`` -> [1, ..., 30] (inclusive)."""
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def _label(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def _add_data_flags(p: argparse.ArgumentParser, labels: bool = True) -> None:
    p.add_argument("--config", help="TOML experiment config; flags override it")
    p.add_argument("--dataset", help="CSV file")
    if labels:
        p.add_argument("--label-col", type=_label, help="label column index or name (default: last)")
    p.add_argument("--drop-column", action="append", type=_label,
                   help="column to ignore, by index or name (repeatable)")
    p.add_argument("--no-header", action="store_true", default=None,
                   help="the CSV has no header row")
    p.add_argument("--normalize", action="store_true", default=None,
                   help="min-max normalize attributes before use")


def _add_model_flags(p: argparse.ArgumentParser, grid: bool) -> None:
    nargs = "+" if grid else None
    p.add_argument("--k", nargs=nargs, help="neighbour count" + (" (values or lo:hi)" if grid else ""))
    p.add_argument("--eps", nargs=nargs, type=float, help="epsilon percentile in [0, 1]")
    p.add_argument("--b", nargs=nargs, help="closest-betweenness node count")
    p.add_argument("--alpha", nargs=nargs, type=float, help="structural vs link-count mix")
    p.add_argument("--insertion", choices=["global", "per_class"])
    p.add_argument("--metric", choices=["euclidean", "manhattan", "chebyshev"])
    p.add_argument("--rule", choices=["sum", "product"], help="how network votes are mixed")
    p.add_argument("--c1", type=float)
    p.add_argument("--c2", type=float)
    p.add_argument("--inertia", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--swarm-size", type=int)
    p.add_argument("--opt-fraction", type=float)
    p.add_argument("--seed", type=int)


def _add_cv_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=["quipus", "baseline"])
    p.add_argument("--folds", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", help="report directory")


def _config(args) -> ExperimentConfig:
    base = ExperimentConfig.from_toml(args.config).to_dict() if getattr(args, "config", None) else {}
    for flag, key in _FLAG_FIELDS.items():
        val = getattr(args, flag, None)
        if val is None:
            continue
        if flag in ("k", "b"):
            vals = val if isinstance(val, list) else [val]
            val = [v for text in vals for v in _int_values(str(text))]
        elif flag == "no_header":
            val = not val
        base[key] = val
    cfg = ExperimentConfig.from_dict(base)
    if not cfg.dataset:
        raise ValueError("no dataset given (--dataset or config file)")
    return cfg


def cmd_cv(args) -> int:
    cfg = _config(args)
    res = run_cv(cfg)
    print(json.dumps({"mode": cfg.mode, "params": res.params, "mean": res.mean, "std": res.std,
                      "repetition_means": res.repetition_means,
                      "wall_seconds": res.timing["wall_seconds"]}, indent=2))
    if cfg.out:
        export_report(res, cfg.out)
    return 0


def cmd_grid(args) -> int:
    cfg = _config(args)
    outcome = run_grid(cfg)
    best = outcome.best
    print(json.dumps({"mode": cfg.mode, "best_params": best.params, "mean": best.mean,
                      "std": best.std, "points": len(outcome.table)}, indent=2))
    if cfg.out:
        export_report(best, cfg.out, table=outcome.table)
    return 0


def cmd_train(args) -> int:
    cfg = _config(args)
    cfg.validate()
    ds = cfg.load()
    point = cfg.point()
    model = ensemble.train(ds, cfg.build_params(point), cfg.hlnb_params(point),
                           cfg.pso_params(cfg.seed), cfg.opt_fraction, cfg.seed, cfg.rule)
    if not cfg.out:
        raise ValueError("train needs --out for the model file")
    ensemble.save_model(model, cfg.out)
    print(json.dumps({"model": cfg.out, "active": model.bundle.active.tolist(),
                      "weights": model.weights.tolist(),
                      "opt_accuracy": model.metadata["opt_accuracy"]}, indent=2))
    return 0


def cmd_predict(args) -> int:
    model = ensemble.load_model(args.model)
    has_labels = args.label_col is not None
    if has_labels:
        ds = load_csv(args.dataset, args.label_col, not args.no_header, args.drop_column or ())
        X = ds.features
    else:
        # a label column is mandatory for the loader; read a dummy one
        X = _read_unlabeled(args.dataset, not args.no_header, args.drop_column or ())
    if X.shape[1] != model.n_attributes:
        raise ValueError(f"dataset has {X.shape[1]} attributes, model expects {model.n_attributes}")
    lines = ["row,predicted"]
    preds = []
    for i, x in enumerate(X):
        cls, _ = ensemble.predict(model, x)
        preds.append(cls)
        lines.append(f"{i},{model.class_names[cls]}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if has_labels:
        names = [ds.class_names[c] for c in ds.labels]
        acc = float(np.mean([model.class_names[p] == n for p, n in zip(preds, names)]))
        print(json.dumps({"accuracy": acc}), file=sys.stderr)
    return 0


def _read_unlabeled(path, has_header: bool, drop) -> np.ndarray:
    import csv
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    header = rows[0] if has_header else None
    body = rows[1:] if has_header else rows
    keep = [j for j in range(len(body[0]))
            if not any(d == j or (header is not None and d == header[j]) for d in drop)]
    return np.array([[float(r[j]) for j in keep] for r in body])


def cmd_export_graphs(args) -> int:
    cfg = _config(args)
    cfg.validate()
    ds = cfg.load()
    point = cfg.point()
    bundle = ensemble.filter_by_modularity(
        ensemble.build_bundle(ds, cfg.build_params(point), cfg.hlnb_params(point)))
    out = Path(cfg.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    summary = []
    for i, g in enumerate(bundle.graphs):
        stem = "instance" if i == 0 else f"attribute_{i}"
        write_graphml(g, out / f"{stem}.graphml", ds.class_names)
        write_dot(g, out / f"{stem}.dot", ds.class_names, stem)
        q = bundle.modularities[i]
        summary.append({"network": "instance" if i == 0 else ds.attribute_names[i - 1],
                        "modularity": None if np.isnan(q) else float(q),
                        "active": bool(bundle.active[i]), "edges": g.n_edges})
    (out / "networks.json").write_text(json.dumps(summary, indent=2), encoding="utf-8")
    print(json.dumps(summary, indent=2))
    return 0


def cmd_normalize(args) -> int:
    if not args.dataset or not args.out:
        raise ValueError("normalize needs --dataset and --out")
    ds = load_csv(args.dataset, -1 if args.label_col is None else args.label_col,
                  not args.no_header, args.drop_column or ())
    write_csv(min_max_normalize(ds), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quipus", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cv", help="repeated stratified k-fold cross-validation")
    _add_data_flags(p)
    _add_model_flags(p, grid=False)
    _add_cv_flags(p)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("grid", help="grid search over k, eps, b and alpha")
    _add_data_flags(p)
    _add_model_flags(p, grid=True)
    _add_cv_flags(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("train", help="fit a model on a whole dataset and save it as JSON")
    _add_data_flags(p)
    _add_model_flags(p, grid=False)
    p.add_argument("--out", required=True, help="model file")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="classify rows with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--label-col", type=_label,
                   help="label column, if present; accuracy is then reported on stderr")
    p.add_argument("--drop-column", action="append", type=_label)
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--out", help="CSV of predictions (default: stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("export-graphs", help="write GraphML/DOT for every network of a dataset")
    _add_data_flags(p)
    _add_model_flags(p, grid=False)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_export_graphs)

    p = sub.add_parser("normalize", help="min-max normalize a CSV")
    p.add_argument("--dataset", required=True)
    p.add_argument("--label-col", type=_label)
    p.add_argument("--drop-column", action="append", type=_label)
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_normalize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, ArithmeticError, KeyError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
