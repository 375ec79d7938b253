import heapq
import math
import time

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
from shared.errors import DegenerateDensity, InsufficientSamples, InvalidParameter
from shared.metrics import TRAINING_DURATION
from shared.schemas.base import Variant
from shared.schemas.dataset import Dataset
from shared.schemas.forest import DensityField, KnnAdjacency, PrototypeSet, TrainedForest

logger = structlog.get_logger(__name__)


def gaussian_density(
    distances: NDArray[np.float64], sigma: float, k: int
) -> float:
    """rho = 1/sqrt(2 pi sigma^2 k) * sum(exp(-d / (2 sigma^2))), d not squared."""
    two_sigma_sq = 2.0 * sigma * sigma
    norm = 1.0 / math.sqrt(2.0 * math.pi * sigma * sigma * k)
    return float(norm * np.sum(np.exp(-distances / two_sigma_sq)))


def _effective_k(k: int, n: int) -> int:
    if k < 1:
        raise InvalidParameter(f"k must be positive, got {k}")
    if n < 2:
        raise InsufficientSamples(f"a k-NN graph needs at least 2 samples, got {n}")
    if k > n - 1:
        logger.warning("k clamped to n - 1", requested=k, effective=n - 1, n=n)
        return n - 1
    return k


def _neighbor_table(
    oracle: DistanceOracle, ids: NDArray[np.int64], k: int
) -> list[tuple[tuple[int, float], ...]]:
    n = len(ids)
    table = []
    for i in range(n):
        others = np.delete(np.arange(n), i)
        row = oracle.row(i)[others]
        nearest = np.lexsort((ids[others], row))[:k]
        table.append(
            tuple((int(ids[others[j]]), float(row[j])) for j in nearest)
        )
    return table


def knn_adjacency(
    train: Dataset,
    k: int,
    metric: str = "euclidean",
    budget_bytes: int | None = None,
) -> KnnAdjacency:
    k_eff = _effective_k(k, len(train))
    oracle = DistanceOracle(train.matrix, metric, budget_or_default(budget_bytes))
    return KnnAdjacency(
        k=k_eff,
        ids=tuple(int(i) for i in train.ids),
        neighbors=tuple(_neighbor_table(oracle, train.ids, k_eff)),
    )


def _truncate(adj: KnnAdjacency, k: int) -> KnnAdjacency:
    return KnnAdjacency(
        k=k, ids=adj.ids, neighbors=tuple(row[:k] for row in adj.neighbors)
    )


def compute_density(adj: KnnAdjacency) -> DensityField:
    d_max = adj.d_max
    if d_max <= 0.0:
        raise DegenerateDensity(
            f"all k-NN arcs have length 0 (k={adj.k}); sigma would be 0"
        )
    sigma = d_max / 3
    rho = tuple(
        gaussian_density(np.array([d for _, d in row]), sigma, adj.k)
        for row in adj.neighbors
    )
    return DensityField(rho=rho, sigma=sigma, d_max=d_max, k=adj.k)


def _compete(
    train: Dataset, adj: KnnAdjacency, density: DensityField, metric: str
) -> TrainedForest:
    n = len(train)
    ids = train.ids
    rho = np.array(density.rho)
    graph = adj.symmetric_closure()

    # rho - 1 keeps plateaus from splitting into many roots
    cost = rho - 1.0
    pred = np.full(n, -1, dtype=np.int64)
    root = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    order: list[int] = []
    roots: list[int] = []

    heap = [(-float(cost[i]), i) for i in range(n)]
    heapq.heapify(heap)

    while heap:
        negated, v = heapq.heappop(heap)
        if done[v] or -negated < cost[v]:
            continue
        done[v] = True
        order.append(v)
        if pred[v] < 0:
            root[v] = v
            cost[v] = rho[v]
            roots.append(v)

        for u in graph[v]:
            if done[u]:
                continue
            offered = min(cost[v], rho[u])
            if offered > cost[u]:
                cost[u] = offered
                pred[u] = v
                root[u] = root[v]
                heapq.heappush(heap, (-float(offered), u))

    return TrainedForest(
        variant=Variant.KNN,
        metric=metric,
        samples=train,
        cost=tuple(float(c) for c in cost),
        pred=tuple(int(ids[p]) if p >= 0 else None for p in pred),
        root=tuple(int(ids[r]) for r in root),
        prototypes=PrototypeSet(ids=frozenset(int(ids[r]) for r in roots)),
        order=tuple(int(ids[i]) for i in order),
        k=adj.k,
        density=density,
    )


def train_knn(
    train: Dataset,
    k: int,
    metric: str = "euclidean",
    budget_bytes: int | None = None,
) -> TrainedForest:
    started = time.perf_counter()
    metric = resolve_metric(metric)
    adj = knn_adjacency(train, k, metric, budget_bytes)
    forest = _compete(train, adj, compute_density(adj), metric)
    elapsed = time.perf_counter() - started
    TRAINING_DURATION.labels(variant=Variant.KNN.value).observe(elapsed)
    logger.info(
        "k-NN-OPF forest trained",
        n=len(train),
        k=adj.k,
        metric=metric,
        roots=len(forest.prototypes),
        seconds=round(elapsed, 6),
    )
    return forest


def _conquest(
    forest: TrainedForest, distances: NDArray[np.float64]
) -> tuple[NDArray[np.int64], NDArray[np.float64]]:
    assert forest.k is not None and forest.density is not None
    nearest = np.lexsort((forest.samples.ids, distances))[: forest.k]
    rho_t = gaussian_density(distances[nearest], forest.density.sigma, forest.k)
    values = np.minimum(forest.cost_array[nearest], rho_t)
    return nearest, values


def _classify(forest: TrainedForest, distances: NDArray[np.float64]) -> Conquest:
    nearest, values = _conquest(forest, distances)
    best = first_in_settlement_order(forest, nearest, -values)
    v = int(nearest[best])
    return Conquest(
        label=forest.label[v],
        cost=float(values[best]),
        conqueror=int(forest.samples.ids[v]),
    )


def classify_knn(forest: TrainedForest, features: ArrayLike) -> Conquest:
    """Maximizes min(C(v), rho(t)) over the query's k nearest training nodes."""
    return _classify(forest, query_distances(forest, features))


def offered_costs_knn(
    forest: TrainedForest, features: ArrayLike
) -> list[tuple[int, float]]:
    nearest, values = _conquest(forest, query_distances(forest, features))
    return [
        (int(forest.samples.ids[v]), float(value))
        for v, value in zip(nearest, values, strict=True)
    ]


def training_accuracy(forest: TrainedForest, oracle: DistanceOracle) -> float:
    labels = forest.samples.labels
    hits = sum(
        _classify(forest, oracle.row(i)).label == labels[i] for i in range(forest.n)
    )
    return hits / forest.n


def select_k(
    train: Dataset,
    k_max: int = 20,
    metric: str = "euclidean",
    budget_bytes: int | None = None,
) -> int:
    if k_max < 1:
        raise InvalidParameter(f"k_max must be positive, got {k_max}")
    metric = resolve_metric(metric)
    upper = _effective_k(k_max, len(train))
    oracle = DistanceOracle(train.matrix, metric, budget_or_default(budget_bytes))
    full = KnnAdjacency(
        k=upper,
        ids=tuple(int(i) for i in train.ids),
        neighbors=tuple(_neighbor_table(oracle, train.ids, upper)),
    )

    best_k: int | None = None
    best_accuracy = -1.0
    for k in range(1, upper + 1):
        adj = _truncate(full, k)
        try:
            forest = _compete(train, adj, compute_density(adj), metric)
        except DegenerateDensity:
            logger.warning("Skipping k with degenerate density", k=k)
            continue
        accuracy = training_accuracy(forest, oracle)
        logger.debug("k candidate evaluated", k=k, accuracy=accuracy)
        if accuracy > best_accuracy:
            best_k, best_accuracy = k, accuracy

    if best_k is None:
        raise DegenerateDensity(f"density is degenerate for every k in 1..{upper}")
    logger.info("k selected", k=best_k, accuracy=best_accuracy, k_max=k_max)
    return best_k
