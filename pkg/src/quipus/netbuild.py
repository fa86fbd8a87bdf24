"""kNN + epsilon-radius network construction and insertion of unlabeled points.

A node links to every same-label node closer than the radius when there are
more than ``k`` of them, and to its ``k`` nearest same-label nodes otherwise.
The radius is the ``epsilon_percentile`` quantile of all the k-nearest
distances gathered while building the graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .graph import LabeledGraph

METRICS = {"euclidean": "euclidean", "manhattan": "cityblock", "chebyshev": "chebyshev"}


class BuildError(ValueError):
    pass


@dataclass(frozen=True)
class BuildParams:
    k: int = 1
    epsilon_percentile: float = 0.0
    metric: str = "euclidean"
    insertion: str = "global"

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise BuildError(f"k must be an integer >= 1, got {self.k}")
        if not 0.0 <= self.epsilon_percentile <= 1.0:
            raise BuildError(f"epsilon_percentile must lie in [0, 1], got {self.epsilon_percentile}")
        if self.metric not in METRICS:
            raise BuildError(f"unknown metric {self.metric!r}; choose from {sorted(METRICS)}")
        if self.insertion not in ("per_class", "global"):
            raise BuildError(f"insertion must be 'per_class' or 'global', got {self.insertion!r}")


@dataclass(frozen=True)
class InsertionReport:
    """Links an unlabeled point would make, grouped by class of the target."""

    links_per_class: np.ndarray
    chosen_neighbors: tuple[np.ndarray, ...]

    @property
    def total_links(self) -> int:
        return int(self.links_per_class.sum())

    def all_links(self) -> np.ndarray:
        if not self.chosen_neighbors:
            return np.zeros(0, dtype=np.int64)
        return np.sort(np.concatenate(self.chosen_neighbors))


def _as_matrix(columns) -> np.ndarray:
    X = np.asarray(columns, dtype=float)
    return X.reshape(-1, 1) if X.ndim == 1 else X


def _nearest(dist_row: np.ndarray, candidates: np.ndarray, k: int) -> np.ndarray:
    """The ``k`` closest candidates; equal distances go to the smaller id."""
    order = np.argsort(dist_row[candidates], kind="stable")
    return candidates[order[:k]]


def build_network(columns, labels, p: BuildParams, row_ids=None,
                  within_class: bool = True) -> LabeledGraph:
    """Training graph over ``columns`` (one attribute or whole rows).

    Only same-label nodes are candidates, so every edge joins two nodes of
    one class. Links are symmetrized: an edge exists if either end chose it.

    With ``within_class=False`` every other node is a candidate. Such a graph
    is not used for classification; its label modularity measures how well
    the columns separate the classes.
    """
    X = _as_matrix(columns)
    y = np.asarray(labels, dtype=np.int64)
    n = X.shape[0]
    if n < 2:
        raise BuildError("need at least two instances to build a network")
    if len(y) != n:
        raise BuildError("labels and columns disagree on row count")
    D = cdist(X, X, METRICS[p.metric])
    ids = np.arange(n)
    knn: list[np.ndarray] = []
    pooled = []
    same = (lambda i: y == y[i]) if within_class else (lambda i: np.ones(n, dtype=bool))
    for i in range(n):
        cand = ids[same(i) & (ids != i)]
        near = _nearest(D[i], cand, p.k)
        knn.append(near)
        pooled.append(D[i, near])
    pooled_d = np.concatenate(pooled) if pooled else np.zeros(0)
    radius = float(np.quantile(pooled_d, p.epsilon_percentile)) if len(pooled_d) else 0.0

    nbrs: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        chosen = knn[i]
        ball = ids[same(i) & (ids != i) & (D[i] < radius)]
        if len(ball) > p.k:
            chosen = ball
        for j in chosen:
            nbrs[i].add(int(j))
            nbrs[int(j)].add(i)
    adj = [np.array(sorted(s), dtype=np.int64) for s in nbrs]
    return LabeledGraph(y, adj, row_ids=row_ids, points=X, radius=radius)


def insertion_links(g: LabeledGraph, point, p: BuildParams) -> InsertionReport:
    """Where an unlabeled ``point`` would attach in ``g``.

    ``per_class`` applies the construction rule separately against the
    nodes of every class, so the point gains links into each class.
    ``global`` applies it once against all nodes regardless of label.
    """
    if g.points is None:
        raise BuildError("graph carries no feature points; build it with build_network")
    x = np.asarray(point, dtype=float).reshape(1, -1)
    if x.shape[1] != g.points.shape[1]:
        raise BuildError(f"point has {x.shape[1]} features, graph expects {g.points.shape[1]}")
    d = cdist(x, g.points, METRICS[p.metric])[0]
    radius = g.radius if g.radius is not None else 0.0
    n_classes = g.n_classes
    ids = np.arange(g.n_nodes)

    def rule(cand: np.ndarray) -> np.ndarray:
        ball = cand[d[cand] < radius]
        return np.sort(ball) if len(ball) > p.k else np.sort(_nearest(d, cand, p.k))

    if p.insertion == "per_class":
        chosen = tuple(rule(ids[g.labels == c]) for c in range(n_classes))
    else:
        picked = rule(ids)
        chosen = tuple(picked[g.labels[picked] == c] for c in range(n_classes))
    counts = np.array([len(c) for c in chosen], dtype=np.int64)
    return InsertionReport(counts, chosen)
