from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from quipus.dataset import load_csv
from quipus.graph import LabeledGraph

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def iris():
    return load_csv(DATA / "iris.csv")


@pytest.fixture(scope="session")
def wine():
    return load_csv(DATA / "wine.csv")


@pytest.fixture(scope="session")
def zoo():
    return load_csv(DATA / "zoo.csv", drop_columns=["name"])


@st.composite
def graphs(draw, min_nodes=1, max_nodes=12, n_classes=3):
    """Random simple graphs as (n, edge list, labels)."""
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    labels = draw(st.lists(st.integers(0, n_classes - 1), min_size=n, max_size=n))
    return n, edges, labels


def to_graph(n, edges, labels=None):
    return LabeledGraph.from_edges(labels if labels is not None else [0] * n, edges)


def random_connected(rng: np.random.Generator, n: int, extra: float = 0.3):
    """Random spanning tree plus extra edges with probability ``extra``."""
    edges = set()
    order = rng.permutation(n)
    for i in range(1, n):
        u, v = int(order[i]), int(order[rng.integers(0, i)])
        edges.add((min(u, v), max(u, v)))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < extra:
                edges.add((i, j))
    return sorted(edges)
