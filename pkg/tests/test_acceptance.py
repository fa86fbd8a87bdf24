"""Acceptance criteria, one verdict line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the PASS/FAIL lines.
Thresholds are fixed; a criterion that is not met fails here.
"""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import random_connected, to_graph
from oracles import betweenness_by_enumeration, build_literal
from quipus.dataset import stratified_split
from quipus.ensemble import build_bundle, filter_by_modularity
from quipus.harness import ExperimentConfig, run_cv
from quipus.measures import betweenness, modularity
from quipus.netbuild import BuildParams, build_network
from quipus.pso import PsoParams, optimize

TESTS = Path(__file__).resolve().parent

# 10 x 10-fold cross-validation, PSO at its defaults
PROTOCOL = dict(repetitions=10, folds=10, seed=0)


def verdict(name: str, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_betweenness_oracle():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(4, 13))
        edges = random_connected(rng, n, extra=float(rng.uniform(0.0, 0.5)))
        got = betweenness(to_graph(n, edges))
        worst = max(worst, float(np.max(np.abs(got - betweenness_by_enumeration(n, edges)))))
    took = time.perf_counter() - t0
    verdict("betweenness oracle (200 graphs, 4-12 nodes)", worst <= 1e-9 and took < 10,
            f"max |diff| = {worst:.1e}, {took:.1f}s")


def test_construction_oracle():
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(100):
        n = int(rng.integers(2, 21))
        d = int(rng.integers(1, 4))
        pts = rng.integers(-5, 6, size=(n, d)).astype(float)
        labels = rng.integers(0, int(rng.integers(2, 4)), size=n)
        k = int(rng.integers(1, 6))
        pct = float(rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]))
        g = build_network(pts, labels, BuildParams(k=k, epsilon_percentile=pct))
        got = {frozenset(e) for e in g.edges()}
        mismatches += got != build_literal(pts.tolist(), labels.tolist(), k, pct)
    took = time.perf_counter() - t0
    verdict("construction oracle (100 datasets)", mismatches == 0 and took < 10,
            f"{mismatches} mismatches, {took:.1f}s")


def test_modularity_closed_forms():
    two = to_graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], [0, 0, 0, 1, 1, 1])
    rng = np.random.default_rng(3)
    single = []
    for n in range(3, 12):
        g = to_graph(n, random_connected(rng, n))
        single.append(modularity(g, [0] * n))
    q = modularity(two)
    verdict("modularity closed forms", q == 0.5 and all(s == 0.0 for s in single),
            f"two cliques Q = {q!r}, single community Q in {sorted(set(single))}")


def test_pso_sphere():
    t0 = time.perf_counter()
    hits = 0
    for seed in range(100):
        res = optimize(lambda w: -float(np.sum((w - 0.5) ** 2)), 5,
                       PsoParams(c1=0.5, c2=0.1, inertia=0.9, iterations=500, seed=seed))
        hits += np.linalg.norm(res.best_position - 0.5) <= 1e-2
    took = time.perf_counter() - t0
    verdict("PSO sphere, 5 dims", hits >= 95 and took < 30, f"{hits}/100 within 1e-2, {took:.1f}s")


@pytest.mark.slow
def test_wine_headline(wine):
    t0 = time.perf_counter()
    quipus = run_cv(ExperimentConfig(k=(7,), epsilon_percentile=(0.0,), b=(3,), alpha=(1.0,),
                                     **PROTOCOL), wine)
    base = {k: run_cv(ExperimentConfig(mode="baseline", k=(k,), b=(3,), alpha=(1.0,),
                                       **PROTOCOL), wine).mean
            for k in range(1, 11)}
    best_k = max(base, key=lambda k: (base[k], -k))
    gap = quipus.mean - base[best_k]
    took = time.perf_counter() - t0
    verdict("Wine: Quipus >= 85% and >= 5 pp over tuned baseline",
            quipus.mean >= 0.85 and gap >= 0.05,
            f"Quipus {100 * quipus.mean:.2f} +- {100 * quipus.std:.2f}, baseline "
            f"{100 * base[best_k]:.2f} (k={best_k}), gap {100 * gap:.2f} pp, {took:.0f}s")


@pytest.mark.slow
def test_iris(iris):
    t0 = time.perf_counter()
    res = run_cv(ExperimentConfig(k=(12,), epsilon_percentile=(0.0,), b=(3,), alpha=(1.0,),
                                  **PROTOCOL), iris)
    took = time.perf_counter() - t0
    verdict("Iris: Quipus >= 92%", res.mean >= 0.92 and took < 600,
            f"{100 * res.mean:.2f} +- {100 * res.std:.2f}, {took:.0f}s")


@pytest.mark.slow
def test_zoo(zoo):
    t0 = time.perf_counter()
    res = run_cv(ExperimentConfig(k=(1,), epsilon_percentile=(0.0,), b=(1,), alpha=(1.0,),
                                  **PROTOCOL), zoo)
    took = time.perf_counter() - t0
    verdict("Zoo: Quipus >= 92%", res.mean >= 0.92 and took < 600,
            f"{100 * res.mean:.2f} +- {100 * res.std:.2f}, {took:.0f}s")


def test_filter_pattern(wine):
    instance_active, filtered = 0, 0
    kept = []
    for seed in range(20):
        net = stratified_split(wine, 0.8, seed).first
        b = filter_by_modularity(build_bundle(net, BuildParams(k=7)))
        instance_active += bool(b.active[0])
        filtered += int((~b.active[1:]).sum() >= 1)
        kept.append(int(b.active[1:].sum()))
    verdict("Wine filter pattern (20 X_net seeds)", instance_active == 20 and filtered >= 18,
            f"instance active {instance_active}/20, >= 1 attribute filtered in {filtered}/20, "
            f"attributes kept per seed {sorted(kept)}")


# invariant -> the property test that encodes it
PROPERTY_TESTS = [
    "test_dataset.py::test_split_partitions_rows",
    "test_dataset.py::test_kfold_partitions_rows",
    "test_dataset.py::test_csv_round_trip",
    "test_graph.py::test_degree_sum",
    "test_graph.py::test_overlay_drop_restores",
    "test_graph.py::test_overlay_matches_materialized",
    "test_graph.py::test_class_subgraph_is_induced",
    "test_netbuild.py::test_structural_invariants",
    "test_netbuild.py::test_percentile_zero_is_symmetrized_knn",
    "test_netbuild.py::test_wine_insertion_per_class",
    "test_netbuild.py::test_matches_literal_rule",
    "test_measures.py::test_betweenness_matches_enumeration",
    "test_measures.py::test_cycle_is_uniform",
    "test_measures.py::test_overlay_betweenness_equals_rebuilt",
    "test_measures.py::test_modularity_matches_double_sum",
    "test_measures.py::test_clustering_in_unit_interval",
    "test_hlnb.py::test_output_is_distribution",
    "test_hlnb.py::test_alpha_zero_argmax_has_most_links",
    "test_hlnb.py::test_affine_in_alpha",
    "test_hlnb.py::test_deterministic_and_graph_untouched",
    "test_pso.py::test_trace_monotone_and_positions_in_box",
    "test_pso.py::test_same_seed_same_trajectory",
    "test_ensemble.py::test_prediction_leaves_model_unchanged",
    "test_ensemble.py::test_weight_scale_invariance",
    "test_ensemble.py::test_instance_only_model_is_baseline",
    "test_ensemble.py::test_train_reports_score_at_returned_weights",
    "test_ensemble.py::test_cached_objective_matches_from_scratch",
    "test_harness.py::test_json_round_trip_and_recompute",
    "test_harness.py::test_byte_identical_reruns",
    "test_harness.py::test_baseline_builds_no_attribute_graphs",
]


def test_property_suite():
    ids = [str(TESTS / t) for t in PROPERTY_TESTS]
    r = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *ids],
                       capture_output=True, text=True, cwd=TESTS.parent)
    summary = r.stdout.strip().splitlines()[-1] if r.stdout.strip() else r.stderr[-200:]
    verdict(f"property suite ({len(PROPERTY_TESTS)} invariants)", r.returncode == 0, summary)
