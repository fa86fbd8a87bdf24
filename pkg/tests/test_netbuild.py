import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import build_literal, euclid
from quipus.dataset import stratified_split
from quipus.measures import modularity
from quipus.netbuild import BuildError, BuildParams, build_network, insertion_links


def edge_set(g):
    return {frozenset(e) for e in g.edges()}


def test_four_points_against_oracle():
    pts = [[0.0], [1.0], [2.0], [10.0]]
    want = build_literal(pts, [0] * 4, k=2, percentile=0.5)
    assert want == {frozenset(e) for e in [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]}
    g = build_network(np.array(pts), [0] * 4, BuildParams(k=2, epsilon_percentile=0.5))
    assert edge_set(g) == want


def test_two_points():
    g = build_network([[0.0], [3.0]], [1, 1], BuildParams(k=1))
    assert edge_set(g) == {frozenset((0, 1))}


def test_radius_branch_fires():
    # nearest-neighbour distances 1,1,1,1,10,10; at percentile 1 the radius is 10,
    # so the four clustered points see three others inside it (> k = 1)
    pts = np.array([0.0, 1.0, 2.0, 3.0, 50.0, 60.0])
    g = build_network(pts, [0] * 6, BuildParams(k=1, epsilon_percentile=1.0))
    assert g.radius == 10.0
    k4 = {frozenset((i, j)) for i in range(4) for j in range(i + 1, 4)}
    assert edge_set(g) == k4 | {frozenset((4, 5))}
    assert edge_set(g) == build_literal(pts.reshape(-1, 1).tolist(), [0] * 6, 1, 1.0)


def test_build_errors():
    with pytest.raises(BuildError):
        build_network([[1.0]], [0], BuildParams(k=1))
    with pytest.raises(BuildError):
        BuildParams(k=0)
    with pytest.raises(BuildError):
        BuildParams(epsilon_percentile=1.5)


def test_small_class_truncates():
    g = build_network([[0.0], [1.0], [5.0]], [0, 0, 1], BuildParams(k=5))
    assert edge_set(g) == {frozenset((0, 1))}
    assert g.degree()[2] == 0


@st.composite
def labeled_points(draw, max_n=20):
    n = draw(st.integers(2, max_n))
    d = draw(st.integers(1, 3))
    n_classes = draw(st.integers(2, 3))
    # integer grid keeps distances exact in both implementations
    coords = draw(st.lists(st.lists(st.integers(-6, 6), min_size=d, max_size=d),
                           min_size=n, max_size=n))
    labels = draw(st.lists(st.integers(0, n_classes - 1), min_size=n, max_size=n))
    return [[float(c) for c in row] for row in coords], labels


@given(labeled_points(), st.integers(1, 5), st.sampled_from([0.0, 0.1, 0.25, 0.5, 0.9, 1.0]))
@settings(max_examples=150, deadline=None)
def test_matches_literal_rule(data, k, pct):
    pts, labels = data
    g = build_network(np.array(pts), labels, BuildParams(k=k, epsilon_percentile=pct))
    assert edge_set(g) == build_literal(pts, labels, k, pct)


@given(labeled_points(), st.integers(1, 5), st.floats(0, 1))
@settings(max_examples=100, deadline=None)
def test_structural_invariants(data, k, pct):
    pts, labels = data
    X = np.array(pts)
    g = build_network(X, labels, BuildParams(k=k, epsilon_percentile=pct))
    knn_only = build_network(X, labels, BuildParams(k=k, epsilon_percentile=0.0))
    for u, v in g.edges():
        assert labels[u] == labels[v]
    for i in range(len(labels)):
        same = sum(1 for j in range(len(labels)) if j != i and labels[j] == labels[i])
        assert g.degree()[i] >= min(k, same)
    # a radius set only replaces the kNN set when it is larger, and then contains it
    assert edge_set(knn_only) <= edge_set(g)


@given(labeled_points(), st.integers(1, 4))
@settings(max_examples=100, deadline=None)
def test_percentile_zero_is_symmetrized_knn(data, k):
    pts, labels = data
    g = build_network(np.array(pts), labels, BuildParams(k=k, epsilon_percentile=0.0))
    want = set()
    for i, p in enumerate(pts):
        cands = sorted((euclid(p, pts[j]), j) for j in range(len(pts))
                       if j != i and labels[j] == labels[i])
        want |= {frozenset((i, j)) for _, j in cands[:k]}
    assert edge_set(g) == want


def test_insert_identical_point():
    X = np.array([[0.0], [4.0], [9.0], [10.0]])
    g = build_network(X, [0, 0, 1, 1], BuildParams(k=1, insertion="per_class"))
    rep = insertion_links(g, [4.0], BuildParams(k=1, insertion="per_class"))
    assert rep.chosen_neighbors[0].tolist() == [1]
    assert rep.chosen_neighbors[1].tolist() == [2]


def test_per_class_insertion_two_each():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(30, 2)) + np.repeat(np.array([[0, 0], [4, 0], [0, 4]]), 10, axis=0)
    y = np.repeat([0, 1, 2], 10)
    p = BuildParams(k=2, epsilon_percentile=0.0, insertion="per_class")
    g = build_network(X, y, p)
    x = np.array([2.0, 2.0])
    rep = insertion_links(g, x, p)
    # oracle: per-class exhaustive nearest scan
    for c in range(3):
        members = [j for j in range(30) if y[j] == c]
        near = sorted(members, key=lambda j: (euclid(x, X[j]), j))[:2]
        assert sorted(rep.chosen_neighbors[c].tolist()) == sorted(near)
    assert rep.links_per_class.tolist() == [2, 2, 2]
    assert rep.total_links == 6


def test_global_insertion_ignores_labels():
    X = np.array([[0.0], [1.0], [10.0], [11.0]])
    p = BuildParams(k=3)
    g = build_network(X, [0, 0, 1, 1], p)
    rep = insertion_links(g, [2.0], p)
    assert rep.links_per_class.tolist() == [2, 1]
    assert rep.all_links().tolist() == [0, 1, 2]


def test_wine_insertion_per_class(wine):
    sp = stratified_split(wine, 0.8, seed=0)
    p = BuildParams(k=7, insertion="per_class")
    g = build_network(sp.first.features, sp.first.labels, p)
    for x in sp.second.features[:5]:
        rep = insertion_links(g, x, p)
        assert rep.links_per_class.tolist() == [7, 7, 7]
        again = insertion_links(g, x, p)
        assert all(np.array_equal(a, b) for a, b in zip(rep.chosen_neighbors, again.chosen_neighbors))


def test_insertion_dimension_mismatch(wine):
    g = build_network(wine.features, wine.labels, BuildParams(k=2))
    with pytest.raises(BuildError):
        insertion_links(g, [1.0, 2.0], BuildParams(k=2))


def test_wine_instance_modularity_band(wine):
    # reference instance-network value 0.3181 comes from the label-blind network
    qs, same_label = [], []
    for seed in range(5):
        net = stratified_split(wine, 0.8, seed).first
        p = BuildParams(k=7)
        qs.append(modularity(build_network(net.features, net.labels, p, within_class=False)))
        same_label.append(modularity(build_network(net.features, net.labels, p)))
    assert all(abs(q - 0.3181) <= 0.10 for q in qs), qs
    # every same-label edge is internal: Q = 1 - sum of squared degree shares
    assert all(q > 0.6 for q in same_label), same_label


def test_label_blind_build_links_across_classes():
    g = build_network([[0.0], [1.0], [5.0]], [0, 1, 1], BuildParams(k=1), within_class=False)
    assert edge_set(g) == {frozenset((0, 1)), frozenset((1, 2))}
