"""High-level classification by betweenness similarity (HLNB-BC).

For every class the unlabeled node is inserted into that class's subgraph.
A class scores well when the new node's betweenness lands close to the
betweenness of ``b`` existing members, and when the node makes many links
into it. ``alpha`` mixes the two pieces of evidence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import GraphError, LabeledGraph
from .measures import betweenness
from .netbuild import InsertionReport

GUARD = 1e-12


class HlnbError(ValueError):
    pass


@dataclass(frozen=True)
class HlnbParams:
    b: int = 1
    alpha: float = 1.0

    def __post_init__(self):
        if int(self.b) != self.b or self.b < 1:
            raise HlnbError(f"b must be an integer >= 1, got {self.b}")
        if not 0.0 <= self.alpha <= 1.0:
            raise HlnbError(f"alpha must lie in [0, 1], got {self.alpha}")


def bc_difference(bc_after: np.ndarray, b: int) -> float:
    """Mean |B(new) - B(j)| over the ``b`` members closest in betweenness.

    ``bc_after`` holds the augmented subgraph's values with the new node
    last. Ties are resolved towards the smaller node id.
    """
    new = bc_after[-1]
    diffs = np.abs(bc_after[:-1] - new)
    if len(diffs) == 0:
        raise HlnbError("class subgraph is empty")
    closest = np.argsort(diffs, kind="stable")[:b]
    return float(diffs[closest].mean())


def difference_scores(diffs: np.ndarray, inserted=None, guard: float = GUARD) -> np.ndarray:
    """Turn per-class BC differences into a distribution; smaller is better.

    ``inserted`` marks the classes the node actually links into. A class it
    does not touch gets no structural credit: the node sits isolated there,
    and its zero betweenness would otherwise match any leaf perfectly.
    """
    inv = 1.0 / (np.asarray(diffs, dtype=float) + guard)
    if inserted is not None and np.any(inserted):
        inv = np.where(inserted, inv, 0.0)
    return inv / inv.sum()


def link_scores(counts: np.ndarray) -> np.ndarray:
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        return np.full(len(counts), 1.0 / len(counts))
    return counts / total


def class_differences(g: LabeledGraph, report: InsertionReport, b: int) -> np.ndarray:
    """The BC-difference evidence for each class (before normalization).

    Classes the node does not link into are left at ``inf`` when it links
    somewhere else; their structural score is zero either way.
    """
    n_classes = len(report.links_per_class)
    if n_classes != g.n_classes:
        raise HlnbError(f"report covers {n_classes} classes, graph has {g.n_classes}")
    out = np.full(n_classes, np.inf)
    any_links = report.total_links > 0
    for c in range(n_classes):
        if any_links and len(report.chosen_neighbors[c]) == 0:
            continue  # gated out in difference_scores
        try:
            view = g.class_subgraph(c)
        except GraphError as exc:
            raise HlnbError(str(exc)) from None
        try:
            local = view.local_ids(report.chosen_neighbors[c])
        except GraphError as exc:
            raise HlnbError(f"report does not match graph: {exc}") from None
        overlay = view.graph.insert_overlay(local, label=c)
        out[c] = bc_difference(betweenness(overlay), b)
    return out


def combine(diffs: np.ndarray, report: InsertionReport, alpha: float) -> np.ndarray:
    inserted = np.array([len(c) > 0 for c in report.chosen_neighbors])
    return (alpha * difference_scores(diffs, inserted)
            + (1.0 - alpha) * link_scores(report.links_per_class))


def classify(g: LabeledGraph, report: InsertionReport, params: HlnbParams) -> np.ndarray:
    """Class distribution for the node described by ``report``."""
    if params.alpha == 0.0:
        # the structural term carries no weight; still validate the report
        if len(report.links_per_class) != g.n_classes:
            raise HlnbError("report/graph class count mismatch")
        return link_scores(report.links_per_class)
    diffs = class_differences(g, report, params.b)
    return combine(diffs, report, params.alpha)
