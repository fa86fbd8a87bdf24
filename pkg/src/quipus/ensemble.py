"""The Quipus ensemble.

One network per attribute plus one over whole rows. Attribute networks
whose modularity falls below the instance network's are switched off. Every
remaining network votes with its HLNB-BC class distribution, and the votes
are mixed with weights fitted by particle swarm on a held-out part of the
training data.

Graph index 0 is always the instance network; index ``j + 1`` is the
network of attribute ``j``.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import hlnb
from .dataset import Dataset, DatasetError, stratified_split
from .graph import LabeledGraph
from .hlnb import HlnbParams
from .measures import MeasureError, modularity
from .netbuild import BuildParams, build_network, insertion_links
from .pso import PsoParams, optimize

MODEL_FORMAT = "quipus-model"
MODEL_VERSION = 1

# instrumentation: how many networks of each kind have been built
BUILD_STATS: Counter = Counter()


class QuipusError(ValueError):
    pass


@dataclass
class NetworkBundle:
    instance_graph: LabeledGraph
    attribute_graphs: list[LabeledGraph]
    modularities: np.ndarray
    active: np.ndarray
    build_params: BuildParams
    hlnb_params: HlnbParams
    weights: np.ndarray | None = None

    @property
    def graphs(self) -> list[LabeledGraph]:
        return [self.instance_graph, *self.attribute_graphs]

    @property
    def active_index(self) -> np.ndarray:
        return np.flatnonzero(self.active)

    def columns_for(self, index: int, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        return X if index == 0 else X[:, [index - 1]]


@dataclass
class ProbabilityTensor:
    scores: np.ndarray        # (instances, active graphs, classes)
    graph_index: np.ndarray   # bundle graph index of each slice
    labels: np.ndarray


@dataclass
class QuipusModel:
    bundle: NetworkBundle
    weights: np.ndarray
    attribute_names: tuple[str, ...]
    class_names: tuple[str, ...]
    metadata: dict = field(default_factory=dict)

    @property
    def n_attributes(self) -> int:
        return len(self.attribute_names)


def separability(columns, labels, p: BuildParams) -> float:
    """Label modularity of the label-blind network over ``columns``.

    Networks built by the training rule only ever link nodes of one class,
    so their label modularity is close to ``1 - sum_c share_c^2`` whatever
    the columns hold. Letting links cross classes makes the modularity
    reflect how cleanly the columns keep the classes apart.
    """
    try:
        return modularity(build_network(columns, labels, p, within_class=False))
    except MeasureError:
        return float("nan")


def build_bundle(ds: Dataset, p: BuildParams, h: HlnbParams | None = None) -> NetworkBundle:
    """All ``arity + 1`` networks over ``ds``, unweighted and unfiltered."""
    h = h or HlnbParams()
    inst = build_network(ds.features, ds.labels, p, row_ids=ds.row_ids)
    attrs = [build_network(ds.features[:, j], ds.labels, p, row_ids=ds.row_ids)
             for j in range(ds.n_attributes)]
    BUILD_STATS["instance"] += 1
    BUILD_STATS["attribute"] += len(attrs)
    q = np.array([separability(ds.features, ds.labels, p)]
                 + [separability(ds.features[:, j], ds.labels, p) for j in range(ds.n_attributes)])
    if np.isnan(q[0]):
        raise QuipusError("instance network has no edges; modularity undefined")
    return NetworkBundle(inst, attrs, q, np.ones(len(q), dtype=bool), p, h)


def filter_by_modularity(bundle: NetworkBundle) -> NetworkBundle:
    """Switch off attribute networks strictly less modular than the instance network."""
    q = bundle.modularities
    active = np.concatenate(([True], q[1:] >= q[0]))  # nan compares False
    return NetworkBundle(bundle.instance_graph, bundle.attribute_graphs, q, active,
                         bundle.build_params, bundle.hlnb_params, None)


def graph_distributions(bundle: NetworkBundle, x, graph_index=None) -> np.ndarray:
    """HLNB-BC distribution of one instance in each listed network, shape (G, C)."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if len(x) != bundle.instance_graph.points.shape[1]:
        raise QuipusError(f"instance has {len(x)} attributes, model expects "
                          f"{bundle.instance_graph.points.shape[1]}")
    idx = bundle.active_index if graph_index is None else graph_index
    graphs = bundle.graphs
    out = []
    for gi in idx:
        g = graphs[gi]
        point = x if gi == 0 else x[[gi - 1]]
        report = insertion_links(g, point, bundle.build_params)
        out.append(hlnb.classify(g, report, bundle.hlnb_params))
    return np.array(out)


def probability_tensor(bundle: NetworkBundle, opt: Dataset) -> ProbabilityTensor:
    idx = bundle.active_index
    n_classes = bundle.instance_graph.n_classes
    scores = np.empty((opt.n_rows, len(idx), n_classes))
    for i, x in enumerate(opt.features):
        scores[i] = graph_distributions(bundle, x, idx)
    return ProbabilityTensor(scores, idx, opt.labels.copy())


def combine_scores(scores: np.ndarray, weights, rule: str = "sum") -> np.ndarray:
    """Mix per-graph distributions ``(..., G, C)`` into ``(..., C)``.

    ``sum`` is the weighted sum. ``product`` is the weighted geometric pool
    ``prod_g p_g ** w_g``. Rows are renormalized, or made uniform when
    nothing is left.
    """
    scores = np.asarray(scores, dtype=float)
    w = np.asarray(weights, dtype=float)
    if scores.shape[-2] != len(w):
        raise QuipusError(f"{len(w)} weights for {scores.shape[-2]} graphs")
    if rule == "sum":
        mixed = np.einsum("...gc,g->...c", scores, w)
    elif rule == "product":
        with np.errstate(divide="ignore", invalid="ignore"):
            logp = np.where(w[:, None] > 0, np.log(scores) * w[:, None], 0.0)
        mixed = np.exp(logp.sum(axis=-2))
    else:
        raise QuipusError(f"unknown combination rule {rule!r}")
    total = mixed.sum(axis=-1, keepdims=True)
    uniform = np.full_like(mixed, 1.0 / mixed.shape[-1])
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(total > 0, mixed / np.where(total > 0, total, 1.0), uniform)


def weighted_predict(scores, weights, rule: str = "sum") -> tuple[int, np.ndarray]:
    """Class and mixed distribution for one instance (``scores`` is (G, C))."""
    dist = combine_scores(scores, weights, rule)
    return int(np.argmax(dist)), dist


def tensor_accuracy(tensor: ProbabilityTensor, weights, rule: str = "sum") -> float:
    if len(tensor.labels) == 0:
        raise QuipusError("empty optimization set")
    pred = np.argmax(combine_scores(tensor.scores, weights, rule), axis=-1)
    return float(np.mean(pred == tensor.labels))


def train(training: Dataset, p: BuildParams, h: HlnbParams, ps: PsoParams,
          opt_fraction: float = 0.2, seed: int = 0, rule: str = "sum") -> QuipusModel:
    """Fit a Quipus model.

    The training rows are split into a network part and an optimization
    part. Networks are built and filtered on the first, each optimization
    row is scored once by every active network, and the swarm searches
    weights against those cached scores. The networks are then rebuilt on
    all training rows, keeping the same active set.
    """
    if not 0.0 < opt_fraction < 1.0:
        raise QuipusError(f"opt_fraction must lie in (0, 1), got {opt_fraction}")
    try:
        split = stratified_split(training, 1.0 - opt_fraction, seed)
    except DatasetError as exc:
        raise QuipusError(f"cannot carve out an optimization set: {exc}") from None
    net, opt = split.first, split.second
    if opt.n_rows == 0:
        raise QuipusError("optimization set is empty")

    bundle = filter_by_modularity(build_bundle(net, p, h))
    tensor = probability_tensor(bundle, opt)
    result = optimize(lambda w: tensor_accuracy(tensor, w, rule),
                      len(bundle.active_index), ps)

    final = build_bundle(training, p, h)
    final.active = bundle.active.copy()
    final.weights = result.best_position.copy()
    meta = {
        "seed": seed,
        "opt_fraction": opt_fraction,
        "rule": rule,
        "net_modularities": bundle.modularities.tolist(),
        "final_modularities": final.modularities.tolist(),
        "opt_accuracy": result.best_score,
        "pso": asdict(ps),
    }
    return QuipusModel(final, result.best_position.copy(), training.attribute_names,
                       training.class_names, meta)


def predict(model: QuipusModel, x) -> tuple[int, np.ndarray]:
    x = np.asarray(x, dtype=float).reshape(-1)
    if len(x) != model.n_attributes:
        raise QuipusError(f"instance has {len(x)} attributes, model expects {model.n_attributes}")
    scores = graph_distributions(model.bundle, x)
    return weighted_predict(scores, model.weights, model.metadata.get("rule", "sum"))


def predict_many(model: QuipusModel, X) -> np.ndarray:
    return np.array([predict(model, x)[0] for x in np.atleast_2d(X)], dtype=np.int64)


def baseline_predict(g: LabeledGraph, x, p: BuildParams, h: HlnbParams) -> tuple[int, np.ndarray]:
    """Plain HLNB-BC on a single instance network."""
    dist = hlnb.classify(g, insertion_links(g, x, p), h)
    return int(np.argmax(dist)), dist


# -- serialization -----------------------------------------------------------

def _graph_to_dict(g: LabeledGraph) -> dict:
    return {
        "labels": g.labels.tolist(),
        "row_ids": g.row_ids.tolist(),
        "edges": [list(e) for e in g.edges()],
        "points": g.points.tolist(),
        "radius": g.radius,
    }


def _graph_from_dict(d: dict) -> LabeledGraph:
    return LabeledGraph.from_edges(d["labels"], d["edges"], row_ids=d["row_ids"],
                                   points=np.array(d["points"], dtype=float),
                                   radius=d["radius"])


def model_to_dict(model: QuipusModel) -> dict:
    b = model.bundle
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "attribute_names": list(model.attribute_names),
        "class_names": list(model.class_names),
        "build_params": asdict(b.build_params),
        "hlnb_params": asdict(b.hlnb_params),
        "modularities": [None if np.isnan(q) else q for q in b.modularities.tolist()],
        "active": b.active.tolist(),
        "weights": model.weights.tolist(),
        "metadata": model.metadata,
        "graphs": [_graph_to_dict(g) for g in b.graphs],
    }


def model_from_dict(d: dict) -> QuipusModel:
    if d.get("format") != MODEL_FORMAT:
        raise QuipusError("not a Quipus model document")
    if d.get("version") != MODEL_VERSION:
        raise QuipusError(f"unsupported model version {d.get('version')}")
    graphs = [_graph_from_dict(g) for g in d["graphs"]]
    p = BuildParams(**d["build_params"])
    h = HlnbParams(**d["hlnb_params"])
    q = np.array([np.nan if v is None else v for v in d["modularities"]], dtype=float)
    weights = np.array(d["weights"], dtype=float)
    bundle = NetworkBundle(graphs[0], graphs[1:], q, np.array(d["active"], dtype=bool),
                           p, h, weights)
    return QuipusModel(bundle, weights, tuple(d["attribute_names"]),
                       tuple(d["class_names"]), d.get("metadata", {}))


def save_model(model: QuipusModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model)), encoding="utf-8")


def load_model(path) -> QuipusModel:
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
