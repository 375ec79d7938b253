import heapq
import time
from collections.abc import Mapping

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray

from services.metricspace import DistanceOracle, resolve_metric
from services.opf.common import (
    Conquest,
    budget_or_default,
    first_in_settlement_order,
    query_distances,
)
from shared.errors import InsufficientSamples, SingleClassTraining
from shared.metrics import TRAINING_DURATION
from shared.schemas.base import Variant
from shared.schemas.dataset import Dataset
from shared.schemas.forest import MstEdge, PrototypeSet, TrainedForest

logger = structlog.get_logger(__name__)


def _prim(oracle: DistanceOracle, ids: NDArray[np.int64]) -> list[MstEdge]:
    n = len(ids)
    in_tree = np.zeros(n, dtype=bool)
    key = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    key[0] = 0.0
    edges: list[MstEdge] = []

    for _ in range(n):
        # argmin returns the first minimum, i.e. the smallest candidate id
        v = int(np.argmin(np.where(in_tree, np.inf, key)))
        in_tree[v] = True
        if parent[v] >= 0:
            a, b = sorted((int(ids[parent[v]]), int(ids[v])))
            edges.append(MstEdge(u=a, v=b, weight=float(key[v])))

        row = oracle.row(v)
        closer = ~in_tree & (
            (row < key) | ((row == key) & (parent > v))
        )
        key[closer] = row[closer]
        parent[closer] = v
    return edges


def build_mst(
    train: Dataset, metric: str = "euclidean", budget_bytes: int | None = None
) -> list[MstEdge]:
    if len(train) < 2:
        raise InsufficientSamples(
            f"a spanning tree needs at least 2 samples, got {len(train)}"
        )
    oracle = DistanceOracle(train.matrix, metric, budget_or_default(budget_bytes))
    return _prim(oracle, train.ids)


def elect_prototypes(mst: list[MstEdge], labels: Mapping[int, int]) -> PrototypeSet:
    if len(set(labels.values())) < 2:
        raise SingleClassTraining("training set holds a single class")
    ids = {
        endpoint
        for edge in mst
        if labels[edge.u] != labels[edge.v]
        for endpoint in (edge.u, edge.v)
    }
    return PrototypeSet(ids=frozenset(ids))


def train_cg(
    train: Dataset, metric: str = "euclidean", budget_bytes: int | None = None
) -> TrainedForest:
    started = time.perf_counter()
    n = len(train)
    if n < 2:
        raise InsufficientSamples(f"training needs at least 2 samples, got {n}")
    metric = resolve_metric(metric)
    ids = train.ids
    oracle = DistanceOracle(train.matrix, metric, budget_or_default(budget_bytes))

    prototypes = elect_prototypes(_prim(oracle, ids), train.label_of())
    index_of = {int(sample_id): i for i, sample_id in enumerate(ids)}

    cost = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int64)
    root = np.arange(n, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    order: list[int] = []

    heap: list[tuple[float, int]] = []
    for sample_id in sorted(prototypes.ids):
        i = index_of[sample_id]
        cost[i] = 0.0
        heap.append((0.0, i))
    heapq.heapify(heap)

    while heap:
        value, v = heapq.heappop(heap)
        if done[v] or value > cost[v]:
            continue
        done[v] = True
        order.append(v)

        offered = np.maximum(cost[v], oracle.row(v))
        conquered = np.flatnonzero(~done & (offered < cost))
        cost[conquered] = offered[conquered]
        pred[conquered] = v
        root[conquered] = root[v]
        for u in conquered.tolist():
            heapq.heappush(heap, (float(cost[u]), u))

    forest = TrainedForest(
        variant=Variant.CG,
        metric=metric,
        samples=train,
        cost=tuple(float(c) for c in cost),
        pred=tuple(int(ids[p]) if p >= 0 else None for p in pred),
        root=tuple(int(ids[r]) for r in root),
        prototypes=prototypes,
        order=tuple(int(ids[i]) for i in order),
    )
    elapsed = time.perf_counter() - started
    TRAINING_DURATION.labels(variant=Variant.CG.value).observe(elapsed)
    logger.info(
        "CG-OPF forest trained",
        n=n,
        metric=metric,
        prototypes=len(prototypes),
        matrix_precomputed=oracle.precomputed,
        seconds=round(elapsed, 6),
    )
    return forest


def _offered(forest: TrainedForest, features: ArrayLike) -> NDArray[np.float64]:
    return np.maximum(forest.cost_array, query_distances(forest, features))


def classify_cg(forest: TrainedForest, features: ArrayLike) -> Conquest:
    """C(t) = min over v of max(C(v), d(v, t)); returns label, cost and v."""
    offered = _offered(forest, features)
    candidates = np.arange(forest.n)
    v = first_in_settlement_order(forest, candidates, offered)
    return Conquest(
        label=forest.label[v],
        cost=float(offered[v]),
        conqueror=int(forest.samples.ids[v]),
    )


def offered_costs_cg(
    forest: TrainedForest, features: ArrayLike
) -> list[tuple[int, float]]:
    offered = _offered(forest, features)
    return [
        (int(sample_id), float(value))
        for sample_id, value in zip(forest.samples.ids, offered, strict=True)
    ]
