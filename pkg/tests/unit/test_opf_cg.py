import itertools

import networkx as nx
import numpy as np
import pytest

from services.metricspace import pairwise_matrix
from services.opf import (
    build_mst,
    classify,
    classify_cg,
    elect_prototypes,
    offered_costs_cg,
    train_cg,
)
from shared.errors import DimensionMismatch, InsufficientSamples, SingleClassTraining
from shared.schemas.dataset import Dataset
from shared.schemas.forest import MstEdge, TrainedForest


def minimax_costs(ds: Dataset, prototypes: frozenset[int]) -> np.ndarray:
    """Smallest possible largest arc on any path from a prototype."""
    closure = pairwise_matrix(ds).values.copy()
    for k in range(len(ds)):
        closure = np.minimum(closure, np.maximum(closure[:, k : k + 1], closure[k : k + 1, :]))
    index = [int(np.flatnonzero(ds.ids == p)[0]) for p in sorted(prototypes)]
    return closure[index].min(axis=0)


def brute_force_mst_weight(ds: Dataset) -> float:
    w = pairwise_matrix(ds).values
    n = len(ds)
    best = np.inf
    for edges in itertools.combinations(itertools.combinations(range(n), 2), n - 1):
        graph = nx.Graph()
        graph.add_nodes_from(range(n))
        graph.add_edges_from(edges)
        if nx.is_connected(graph):
            best = min(best, sum(w[u, v] for u, v in edges))
    return float(best)


def walk_to_root(forest: TrainedForest, sample_id: int) -> tuple[int, int]:
    """Follow predecessors to the tree root; returns (root id, steps)."""
    steps = 0
    while (pred := forest.pred[forest.index_of[sample_id]]) is not None:
        sample_id = pred
        steps += 1
        assert steps <= forest.n, "predecessor chain does not terminate"
    return sample_id, steps


class TestBuildMst:
    def test_toy(self, toy: Dataset) -> None:
        assert build_mst(toy) == [
            MstEdge(u=0, v=1, weight=1.0),
            MstEdge(u=1, v=2, weight=2.0),
            MstEdge(u=2, v=3, weight=1.0),
        ]

    def test_weight_matches_networkx(self, make_random) -> None:
        for seed in range(10):
            ds = make_random(seed, n=25, dim=4)
            w = pairwise_matrix(ds).values
            graph = nx.Graph()
            for i, j in itertools.combinations(range(len(ds)), 2):
                graph.add_edge(i, j, weight=w[i, j])
            expected = nx.minimum_spanning_tree(graph).size(weight="weight")
            mst = build_mst(ds)
            assert len(mst) == len(ds) - 1
            assert sum(e.weight for e in mst) == pytest.approx(expected, abs=1e-9)

    def test_weight_matches_enumeration(self, make_random) -> None:
        for seed in range(5):
            ds = make_random(100 + seed, n=5, dim=2, n_classes=2)
            weight = sum(e.weight for e in build_mst(ds))
            assert weight == pytest.approx(brute_force_mst_weight(ds), abs=1e-12)

    def test_equal_weights_use_smallest_ids(self) -> None:
        # unit square: every side has weight 1
        ds = Dataset.model_validate(
            {
                "samples": [
                    {"id": 0, "label": 0, "features": [0.0, 0.0]},
                    {"id": 1, "label": 0, "features": [1.0, 0.0]},
                    {"id": 2, "label": 1, "features": [0.0, 1.0]},
                    {"id": 3, "label": 1, "features": [1.0, 1.0]},
                ],
                "n_classes": 2,
                "dim": 2,
            }
        )
        edges = [(e.u, e.v) for e in build_mst(ds)]
        assert edges == [(0, 1), (0, 2), (1, 3)]

    def test_needs_two_samples(self, toy: Dataset) -> None:
        with pytest.raises(InsufficientSamples):
            build_mst(toy.subset({0}))


class TestElectPrototypes:
    def test_toy(self, toy: Dataset) -> None:
        assert elect_prototypes(build_mst(toy), toy.label_of()).ids == frozenset({1, 2})

    def test_single_class(self, toy: Dataset) -> None:
        ds = toy.subset({0, 1})
        with pytest.raises(SingleClassTraining):
            elect_prototypes(build_mst(ds), ds.label_of())

    def test_every_class_owns_a_prototype(self, make_random) -> None:
        rng = np.random.default_rng(99)
        for seed in range(100):
            n_classes = int(rng.integers(2, 6))
            n = int(rng.integers(n_classes, 30))
            ds = make_random(1000 + seed, n=n, dim=int(rng.integers(1, 5)), n_classes=n_classes)
            labels = ds.label_of()
            prototypes = elect_prototypes(build_mst(ds), labels)
            assert {labels[p] for p in prototypes.ids} == ds.classes_present()


class TestTrainCg:
    def test_toy_forest(self, toy_cg: TrainedForest) -> None:
        assert toy_cg.cost == (1.0, 0.0, 0.0, 1.0)
        assert toy_cg.root == (1, 1, 2, 2)
        assert toy_cg.pred == (1, None, None, 2)
        assert toy_cg.order == (1, 2, 0, 3)
        assert toy_cg.label == (0, 0, 1, 1)

    def test_single_class_rejected(self, toy: Dataset) -> None:
        with pytest.raises(SingleClassTraining):
            train_cg(toy.subset({2, 3}))

    def test_predecessor_chains_end_at_prototypes(self, make_random) -> None:
        for seed in range(30):
            forest = train_cg(make_random(seed, n=5 + seed, dim=3))
            for i, sample_id in enumerate(forest.samples.ids.tolist()):
                root, steps = walk_to_root(forest, sample_id)
                assert steps < forest.n
                assert root in forest.prototypes
                assert root == forest.root[i]

    def test_costs_match_minimax_oracle(self, make_random) -> None:
        rng = np.random.default_rng(2024)
        for seed in range(100):
            n = int(rng.integers(4, 33))
            dim = int(rng.integers(1, 9))
            n_classes = int(rng.integers(2, 5))
            ds = make_random(seed, n=n, dim=dim, n_classes=n_classes)
            forest = train_cg(ds)
            expected = minimax_costs(ds, forest.prototypes.ids)
            assert np.allclose(forest.cost_array, expected, rtol=0.0, atol=1e-9)

    def test_training_self_consistency(self, make_random) -> None:
        for seed in range(40):
            ds = make_random(seed, n=24, dim=3, n_classes=3)
            forest = train_cg(ds)
            for i, sample in enumerate(ds.samples):
                conquest = classify_cg(forest, sample.features)
                assert conquest.cost == forest.cost[i]
                assert conquest.label == sample.label

    def test_predecessor_is_earliest_settled_offer(self, make_random) -> None:
        ds = make_random(9, n=20)
        forest = train_cg(ds)
        for i, sample in enumerate(ds.samples):
            if forest.pred[i] is None:
                continue
            offers = [
                (forest.settlement_rank[j], v)
                for j, (v, c) in enumerate(offered_costs_cg(forest, sample.features))
                if c == forest.cost[i] and v != sample.id
            ]
            assert min(offers)[1] == forest.pred[i]

    def test_lazy_and_precomputed_distances_agree(self, make_random) -> None:
        ds = make_random(5, n=30)
        eager = train_cg(ds, budget_bytes=1 << 20)
        lazy = train_cg(ds, budget_bytes=0)
        assert eager.cost == lazy.cost
        assert eager.order == lazy.order


class TestClassifyCg:
    def test_toy_query(self, toy_cg: TrainedForest) -> None:
        conquest = classify_cg(toy_cg, [2.0])
        assert conquest.conqueror == 1
        assert conquest.cost == 1.0
        assert conquest.label == 0

    def test_dispatch(self, toy_cg: TrainedForest) -> None:
        assert classify(toy_cg, [3.5]) == classify_cg(toy_cg, [3.5])

    def test_offered_costs(self, toy_cg: TrainedForest) -> None:
        assert offered_costs_cg(toy_cg, [2.0]) == [(0, 2.0), (1, 1.0), (2, 1.0), (3, 2.0)]

    def test_dimension_mismatch(self, toy_cg: TrainedForest) -> None:
        with pytest.raises(DimensionMismatch):
            classify_cg(toy_cg, [1.0, 2.0])
