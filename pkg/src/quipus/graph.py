"""Labeled undirected graphs, class-subgraph views and reversible overlay insertion."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator
from xml.sax.saxutils import escape

import numpy as np


class GraphError(ValueError):
    pass


class LabeledGraph:
    """Simple undirected graph whose nodes carry a class label.

    Nodes are dense ids ``0..V-1``. The graph is immutable once built;
    ``points`` and ``radius`` optionally record the feature vectors and the
    epsilon radius used to build it, which insertion needs later.
    """

    def __init__(self, labels, adjacency: list[np.ndarray], row_ids=None,
                 points=None, radius: float | None = None):
        self.labels = np.asarray(labels, dtype=np.int64)
        self.labels.setflags(write=False)
        if len(adjacency) != len(self.labels):
            raise GraphError("adjacency and labels disagree on node count")
        self._adj = [np.asarray(a, dtype=np.int64) for a in adjacency]
        for a in self._adj:
            a.setflags(write=False)
        self.row_ids = (np.arange(len(self.labels)) if row_ids is None
                        else np.asarray(row_ids, dtype=np.int64))
        self.points = None if points is None else np.asarray(points, dtype=float)
        if self.points is not None and self.points.ndim == 1:
            self.points = self.points.reshape(-1, 1)
        self.radius = radius
        self._csr = None
        self._subgraphs: dict[int, SubgraphView] = {}

    @classmethod
    def from_edges(cls, labels, edges: Iterable[tuple[int, int]], **kw) -> "LabeledGraph":
        """Build from an edge list; duplicates are merged, self-loops rejected."""
        n = len(labels)
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop on node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) references a missing node")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(labels, [np.array(sorted(s), dtype=np.int64) for s in nbrs], **kw)

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return int(sum(len(a) for a in self._adj)) // 2

    @property
    def n_classes(self) -> int:
        return int(self.labels.max()) + 1 if self.n_nodes else 0

    def neighbors(self, v: int) -> np.ndarray:
        return self._adj[v]

    def degree(self) -> np.ndarray:
        return np.array([len(a) for a in self._adj], dtype=np.int64)

    def has_edge(self, u: int, v: int) -> bool:
        a = self._adj[u]
        i = np.searchsorted(a, v)
        return bool(i < len(a) and a[i] == v)

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, a in enumerate(self._adj):
            for v in a:
                if u < v:
                    yield u, int(v)

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Compressed adjacency ``(indptr, indices)``."""
        if self._csr is None:
            deg = self.degree()
            indptr = np.zeros(self.n_nodes + 1, dtype=np.int64)
            np.cumsum(deg, out=indptr[1:])
            indices = (np.concatenate(self._adj) if self.n_nodes
                       else np.zeros(0, dtype=np.int64)).astype(np.int64)
            self._csr = (indptr, indices)
        return self._csr

    def same_structure(self, other: "LabeledGraph") -> bool:
        return (np.array_equal(self.labels, other.labels)
                and len(self._adj) == len(other._adj)
                and all(np.array_equal(a, b) for a, b in zip(self._adj, other._adj)))

    def class_subgraph(self, cls: int) -> "SubgraphView":
        """Induced subgraph on the nodes of class ``cls`` (cached)."""
        cls = int(cls)
        view = self._subgraphs.get(cls)
        if view is None:
            view = class_subgraph(self, cls)
            self._subgraphs[cls] = view
        return view

    def insert_overlay(self, links, label: int = -1) -> "OverlayInsertion":
        return insert_overlay(self, links, label)

    def __repr__(self):
        return f"LabeledGraph(nodes={self.n_nodes}, edges={self.n_edges})"


@dataclass(frozen=True)
class SubgraphView:
    """A class subgraph plus the map from its local ids back to the parent's."""

    graph: LabeledGraph
    back_map: np.ndarray
    cls: int

    def local_ids(self, parent_ids) -> np.ndarray:
        parent_ids = np.asarray(parent_ids, dtype=np.int64)
        pos = np.searchsorted(self.back_map, parent_ids)
        ok = (pos < len(self.back_map))
        ok[ok] = self.back_map[pos[ok]] == parent_ids[ok]
        if not np.all(ok):
            raise GraphError(f"nodes {parent_ids[~ok].tolist()} are not in class {self.cls}")
        return pos


def class_subgraph(g: LabeledGraph, cls: int) -> SubgraphView:
    members = np.flatnonzero(g.labels == cls)
    if len(members) == 0:
        raise GraphError(f"class {cls} has no nodes in this graph")
    local = np.full(g.n_nodes, -1, dtype=np.int64)
    local[members] = np.arange(len(members))
    adj = []
    for v in members:
        nb = local[g.neighbors(v)]
        adj.append(nb[nb >= 0])
    pts = None if g.points is None else g.points[members]
    sub = LabeledGraph(g.labels[members], adj, g.row_ids[members], pts, g.radius)
    return SubgraphView(sub, members, cls)


class OverlayInsertion:
    """A base graph plus one provisional node, without touching the base.

    The overlay answers the same queries as a graph with ``V + 1`` nodes;
    the new node has id ``V``. Dropping it returns the untouched base.
    """

    def __init__(self, base: LabeledGraph, links, label: int = -1):
        links = np.asarray(links, dtype=np.int64).reshape(-1)
        if len(np.unique(links)) != len(links):
            raise GraphError("duplicate overlay link targets")
        if len(links) and (links.min() < 0 or links.max() >= base.n_nodes):
            raise GraphError("overlay link to a node that does not exist")
        self.base = base
        self.new_node = base.n_nodes
        self.label = int(label)
        self.links = np.sort(links)
        self.links.setflags(write=False)

    @property
    def added_edges(self) -> list[tuple[int, int]]:
        return [(self.new_node, int(v)) for v in self.links]

    @property
    def n_nodes(self) -> int:
        return self.base.n_nodes + 1

    @property
    def n_edges(self) -> int:
        return self.base.n_edges + len(self.links)

    @property
    def labels(self) -> np.ndarray:
        return np.append(self.base.labels, self.label)

    def neighbors(self, v: int) -> np.ndarray:
        if v == self.new_node:
            return self.links
        nb = self.base.neighbors(v)
        if np.any(self.links == v):
            return np.append(nb, self.new_node)
        return nb

    def degree(self) -> np.ndarray:
        deg = np.append(self.base.degree(), len(self.links))
        deg[self.links] += 1
        return deg

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        indptr, indices = self.base.csr()
        n = self.base.n_nodes
        extra = np.zeros(n, dtype=np.int64)
        extra[self.links] = 1
        new_ptr = np.zeros(n + 2, dtype=np.int64)
        np.cumsum(np.append(np.diff(indptr) + extra, len(self.links)), out=new_ptr[1:])
        new_idx = np.empty(new_ptr[-1], dtype=np.int64)
        # shift each row by the number of earlier rows that gained the new node
        shift = np.concatenate(([0], np.cumsum(extra)))
        src_pos = np.arange(len(indices)) + np.repeat(shift[:-1], np.diff(indptr))
        new_idx[src_pos] = indices
        new_idx[new_ptr[self.links + 1] - 1] = self.new_node
        new_idx[new_ptr[n]:] = self.links
        return new_ptr, new_idx

    def materialize(self) -> LabeledGraph:
        """The overlay as a standalone graph (for checks and export)."""
        adj = [self.neighbors(v) for v in range(self.n_nodes)]
        row_ids = np.append(self.base.row_ids, -1)
        return LabeledGraph(self.labels, adj, row_ids)

    def drop(self) -> LabeledGraph:
        return self.base


def insert_overlay(g: LabeledGraph, links, label: int = -1) -> OverlayInsertion:
    return OverlayInsertion(g, links, label)


def _attr_rows(g: LabeledGraph, class_names):
    for v in range(g.n_nodes):
        lab = int(g.labels[v])
        name = class_names[lab] if class_names is not None and 0 <= lab < len(class_names) else str(lab)
        yield v, lab, name, int(g.row_ids[v])


def write_graphml(g: LabeledGraph, path, class_names=None) -> None:
    """GraphML with ``label``, ``class_name`` and ``row_id`` node attributes."""
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns" '
        'xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance" '
        'xsi:schemaLocation="http://graphml.graphdrawing.org/xmlns '
        'http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd">',
        '  <key id="d0" for="node" attr.name="label" attr.type="int"/>',
        '  <key id="d1" for="node" attr.name="class_name" attr.type="string"/>',
        '  <key id="d2" for="node" attr.name="row_id" attr.type="int"/>',
        '  <graph id="G" edgedefault="undirected">',
    ]
    for v, lab, name, rid in _attr_rows(g, class_names):
        lines.append(f'    <node id="n{v}"><data key="d0">{lab}</data>'
                     f'<data key="d1">{escape(name)}</data><data key="d2">{rid}</data></node>')
    for i, (u, v) in enumerate(g.edges()):
        lines.append(f'    <edge id="e{i}" source="n{u}" target="n{v}"/>')
    lines += ["  </graph>", "</graphml>", ""]
    Path(path).write_text("\n".join(lines), encoding="utf-8")


def write_dot(g: LabeledGraph, path, class_names=None, name: str = "G") -> None:
    lines = [f"graph {json.dumps(name)} {{"]
    for v, lab, cname, rid in _attr_rows(g, class_names):
        lines.append(f"  n{v} [label={lab}, class_name={json.dumps(cname)}, row_id={rid}];")
    for u, v in g.edges():
        lines.append(f"  n{u} -- n{v};")
    lines += ["}", ""]
    Path(path).write_text("\n".join(lines), encoding="utf-8")
