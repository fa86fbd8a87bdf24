"""Cross-validation, grid search and report export for Quipus experiments."""

from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import asdict, dataclass, field, fields, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import ensemble
from .dataset import Dataset, load_csv, min_max_normalize, stratified_kfold
from .graph import write_dot, write_graphml
from .hlnb import HlnbParams
from .netbuild import BuildParams, build_network
from .pso import GRID_KEYS, PsoParams, grid_points, grid_search

log = logging.getLogger(__name__)

REPETITION_SEED_STRIDE = 1000


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    dataset: str = ""
    label_column: int | str = -1
    drop_columns: tuple = ()
    has_header: bool = True
    mode: str = "quipus"
    k: tuple = (1,)
    epsilon_percentile: tuple = (0.0,)
    b: tuple = (1,)
    alpha: tuple = (1.0,)
    insertion: str = "global"
    metric: str = "euclidean"
    rule: str = "sum"
    c1: float = 0.5
    c2: float = 0.1
    inertia: float = 0.9
    iterations: int = 500
    swarm_size: int = 20
    opt_fraction: float = 0.2
    repetitions: int = 10
    folds: int = 10
    seed: int = 0
    normalize: bool = False
    jobs: int = 1
    out: str | None = None

    def __post_init__(self):
        for key in GRID_KEYS:
            val = getattr(self, key)
            if np.isscalar(val):
                val = (val,)
            setattr(self, key, tuple(val))
        if isinstance(self.drop_columns, (str, int)):
            self.drop_columns = (self.drop_columns,)
        self.drop_columns = tuple(self.drop_columns)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_toml(cls, path) -> "ExperimentConfig":
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        with open(path, "rb") as fh:
            return cls.from_dict(tomllib.load(fh))

    def validate(self) -> None:
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        if self.mode not in ("quipus", "baseline"):
            raise ConfigError(f"mode must be 'quipus' or 'baseline', got {self.mode!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        for key in GRID_KEYS:
            if not getattr(self, key):
                raise ConfigError(f"empty grid for {key}")
        try:
            for point in grid_points(self.grid()):
                self.build_params(point)
                self.hlnb_params(point)
            self.pso_params(0)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.rule not in ("sum", "product"):
            raise ConfigError(f"unknown combination rule {self.rule!r}")
        if not 0.0 < self.opt_fraction < 1.0:
            raise ConfigError("opt_fraction must lie in (0, 1)")

    def grid(self) -> dict:
        return {key: list(getattr(self, key)) for key in GRID_KEYS}

    def is_point(self) -> bool:
        return all(len(getattr(self, key)) == 1 for key in GRID_KEYS)

    def at(self, point: dict) -> "ExperimentConfig":
        return replace(self, **{key: (point[key],) for key in GRID_KEYS})

    def point(self) -> dict:
        if not self.is_point():
            raise ConfigError("config holds a grid; use run_grid")
        return {key: getattr(self, key)[0] for key in GRID_KEYS}

    def build_params(self, point: dict) -> BuildParams:
        return BuildParams(int(point["k"]), float(point["epsilon_percentile"]),
                           self.metric, self.insertion)

    def hlnb_params(self, point: dict) -> HlnbParams:
        return HlnbParams(int(point["b"]), float(point["alpha"]))

    def pso_params(self, seed: int) -> PsoParams:
        return PsoParams(self.c1, self.c2, self.inertia, self.iterations,
                         self.swarm_size, seed)

    def load(self) -> Dataset:
        ds = load_csv(self.dataset, self.label_column, self.has_header, self.drop_columns)
        return min_max_normalize(ds) if self.normalize else ds

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in (*GRID_KEYS, "drop_columns"):
            d[key] = list(d[key])
        return d


@dataclass
class ExperimentResult:
    config: dict
    params: dict
    fold_accuracies: list[list[float]]
    folds: list[dict]
    timing: dict = field(default_factory=dict)
    final_graphs: list = field(default=None, repr=False, compare=False)
    class_names: tuple = field(default=(), repr=False, compare=False)

    @property
    def all_accuracies(self) -> np.ndarray:
        return np.array([a for rep in self.fold_accuracies for a in rep])

    @property
    def mean(self) -> float:
        return float(np.mean(self.all_accuracies))

    @property
    def std(self) -> float:
        """Population standard deviation over every repetition x fold accuracy."""
        return float(np.std(self.all_accuracies))

    @property
    def repetition_means(self) -> list[float]:
        return [float(np.mean(rep)) for rep in self.fold_accuracies]

    def to_dict(self, include_timing: bool = True) -> dict:
        d = {
            "config": self.config,
            "params": self.params,
            "mean": self.mean,
            "std": self.std,
            "repetition_means": self.repetition_means,
            "fold_accuracies": self.fold_accuracies,
            "folds": self.folds,
        }
        if include_timing:
            d["timing"] = self.timing
        return d

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentResult":
        res = cls(d["config"], d["params"], d["fold_accuracies"], d["folds"], d.get("timing", {}))
        for key in ("mean", "std"):
            if key in d and not np.isclose(d[key], getattr(res, key), rtol=0, atol=1e-12):
                raise ValueError(f"stored {key} {d[key]} disagrees with fold accuracies")
        return res


def _run_fold(config: ExperimentConfig, point: dict, rep: int, fold: int, split,
              keep_graphs: bool) -> tuple[dict, list | None]:
    seed = config.seed + REPETITION_SEED_STRIDE * rep + fold
    p = config.build_params(point)
    h = config.hlnb_params(point)
    train, test = split.first, split.second
    record = {"repetition": rep, "fold": fold, "seed": seed, "n_test": test.n_rows}
    if config.mode == "quipus":
        model = ensemble.train(train, p, h, config.pso_params(seed), config.opt_fraction,
                               seed, config.rule)
        pred = ensemble.predict_many(model, test.features)
        record.update(
            modularities=model.metadata["net_modularities"],
            active=model.bundle.active.tolist(),
            weights=model.weights.tolist(),
            opt_accuracy=model.metadata["opt_accuracy"],
        )
        graphs = model.bundle.graphs if keep_graphs else None
    else:
        g = build_network(train.features, train.labels, p, row_ids=train.row_ids)
        pred = np.array([ensemble.baseline_predict(g, x, p, h)[0] for x in test.features],
                        dtype=np.int64)
        graphs = [g] if keep_graphs else None
    record["accuracy"] = float(np.mean(pred == test.labels)) if test.n_rows else float("nan")
    return record, graphs


def run_cv(config: ExperimentConfig, ds: Dataset | None = None) -> ExperimentResult:
    """``repetitions`` x ``folds`` train/test cycles at a single parameter point.

    Repetition ``r`` shuffles its folds with ``seed + 1000 r``; fold ``f``
    of it trains with ``seed + 1000 r + f``.
    """
    config.validate()
    point = config.point()
    ds = ds if ds is not None else config.load()
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    tasks = []
    for rep in range(config.repetitions):
        splits = stratified_kfold(ds, config.folds, config.seed + REPETITION_SEED_STRIDE * rep)
        for f, split in enumerate(splits):
            last = rep == config.repetitions - 1 and f == len(splits) - 1
            tasks.append((rep, f, split, last))
    if config.jobs > 1:
        from joblib import Parallel, delayed
        outputs = Parallel(n_jobs=config.jobs)(
            delayed(_run_fold)(config, point, rep, f, split, last) for rep, f, split, last in tasks)
    else:
        outputs = [_run_fold(config, point, rep, f, split, last) for rep, f, split, last in tasks]
    records = [r for r, _ in outputs]
    final_graphs = outputs[-1][1]
    acc = [[r["accuracy"] for r in records if r["repetition"] == rep]
           for rep in range(config.repetitions)]
    elapsed = time.perf_counter() - t0
    res = ExperimentResult(config.to_dict(), point, acc, records,
                           {"started_at": started, "wall_seconds": elapsed},
                           final_graphs, ds.class_names)
    log.info("%s %s: %.4f +- %.4f (%.1fs)", config.mode, point, res.mean, res.std, elapsed)
    return res


@dataclass
class GridOutcome:
    best: ExperimentResult
    table: list[tuple[dict, float]]


def run_grid(config: ExperimentConfig, ds: Dataset | None = None) -> GridOutcome:
    """Cross-validate every grid point and keep the best mean accuracy."""
    config.validate()
    ds = ds if ds is not None else config.load()
    results: dict[tuple, ExperimentResult] = {}

    def evaluate(point: dict) -> float:
        res = run_cv(config.at(point), ds)
        results[tuple(point[k] for k in GRID_KEYS)] = res
        return res.mean

    found = grid_search(config.grid(), evaluate)
    best = results[tuple(found.best[k] for k in GRID_KEYS)]
    return GridOutcome(best, found.table)


def export_report(result: ExperimentResult, path, graphs: bool = True,
                  table: list[tuple[dict, float]] | None = None) -> list[Path]:
    """Write ``result.json``, ``folds.csv`` and, optionally, the last fold's networks."""
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create report directory {out}: {exc}") from None
    written = []
    target = out / "result.json"
    target.write_text(result.to_json(), encoding="utf-8")
    written.append(target)
    target = out / "folds.csv"
    with target.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["repetition", "fold", "seed", "n_test", "accuracy", "active", "weights"])
        for r in result.folds:
            w.writerow([r["repetition"], r["fold"], r["seed"], r["n_test"], r["accuracy"],
                        json.dumps(r.get("active")), json.dumps(r.get("weights"))])
    written.append(target)
    if table is not None:
        target = out / "grid.csv"
        with target.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([*GRID_KEYS, "mean_accuracy"])
            for point, score in table:
                w.writerow([point[k] for k in GRID_KEYS] + [score])
        written.append(target)
    if graphs and result.final_graphs:
        for i, g in enumerate(result.final_graphs):
            stem = "instance" if i == 0 else f"attribute_{i}"
            write_graphml(g, out / f"{stem}.graphml", result.class_names)
            write_dot(g, out / f"{stem}.dot", result.class_names, stem)
            written += [out / f"{stem}.graphml", out / f"{stem}.dot"]
    return written
