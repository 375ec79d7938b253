from collections.abc import Callable, Sequence
from enum import StrEnum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from shared.errors import DimensionMismatch, UnknownMetric
from shared.schemas.dataset import Dataset, LabeledSample

# distances from one vector to every row of a block
Kernel = Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]]


class MetricId(StrEnum):
    EUCLIDEAN = "euclidean"
    MANHATTAN = "manhattan"
    SQUARED_EUCLIDEAN = "sqeuclidean"


def _euclidean(a: NDArray[np.float64], block: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.sqrt(np.sum((block - a) ** 2, axis=1))


def _manhattan(a: NDArray[np.float64], block: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.sum(np.abs(block - a), axis=1)


def _squared_euclidean(
    a: NDArray[np.float64], block: NDArray[np.float64]
) -> NDArray[np.float64]:
    return np.sum((block - a) ** 2, axis=1)


_REGISTRY: dict[str, Kernel] = {
    MetricId.EUCLIDEAN: _euclidean,
    MetricId.MANHATTAN: _manhattan,
    MetricId.SQUARED_EUCLIDEAN: _squared_euclidean,
}

_ALIASES = {"squared-euclidean": MetricId.SQUARED_EUCLIDEAN.value}


def register_metric(name: str, kernel: Kernel) -> None:
    """Add a distance to the registry.

    The kernel must be nonnegative, symmetric and zero only on identical
    vectors; OPF does not need the triangle inequality.
    """
    key = name.lower()
    if key in _REGISTRY or key in _ALIASES:
        raise ValueError(f"metric already registered: {name}")
    _REGISTRY[key] = kernel


def resolve_metric(name: str) -> str:
    key = _ALIASES.get(name.lower(), name.lower())
    if key not in _REGISTRY:
        raise UnknownMetric(
            f"unknown metric {name!r}; expected one of {', '.join(available_metrics())}"
        )
    return key


def available_metrics() -> list[str]:
    return sorted(_REGISTRY)


def get_kernel(name: str) -> Kernel:
    return _REGISTRY[resolve_metric(name)]


def as_vector(features: ArrayLike | LabeledSample) -> NDArray[np.float64]:
    if isinstance(features, LabeledSample):
        features = features.features
    return np.asarray(features, dtype=np.float64).reshape(-1)


def distances_to(
    a: ArrayLike, block: NDArray[np.float64], metric: str
) -> NDArray[np.float64]:
    vector = as_vector(a)
    if block.ndim != 2 or block.shape[1] != vector.shape[0]:
        raise DimensionMismatch(block.shape[-1], vector.shape[0])
    return get_kernel(metric)(vector, block)


def distance(a: ArrayLike, b: ArrayLike, metric: str = MetricId.EUCLIDEAN) -> float:
    u, v = as_vector(a), as_vector(b)
    if u.shape != v.shape:
        raise DimensionMismatch(u.shape[0], v.shape[0])
    return float(get_kernel(metric)(u, v[np.newaxis, :])[0])


class DistanceMatrix:
    """Immutable symmetric n x n distances with an exactly zero diagonal."""

    __slots__ = ("_values",)

    def __init__(self, values: NDArray[np.float64]) -> None:
        values = np.array(values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("distance matrix must be square")
        values.setflags(write=False)
        self._values = values

    @property
    def n(self) -> int:
        return int(self._values.shape[0])

    @property
    def values(self) -> NDArray[np.float64]:
        return self._values

    def row(self, i: int) -> NDArray[np.float64]:
        return self._values[i]

    def __getitem__(self, key: tuple[int, int]) -> float:
        return float(self._values[key])

    def tolist(self) -> list[list[float]]:
        return [[float(x) for x in row] for row in self._values]


def pairwise_matrix(
    samples: Dataset | Sequence[LabeledSample] | NDArray[np.float64],
    metric: str = MetricId.EUCLIDEAN,
) -> DistanceMatrix:
    if isinstance(samples, Dataset):
        points = samples.matrix
    elif isinstance(samples, np.ndarray):
        points = np.asarray(samples, dtype=np.float64)
    else:
        if not samples:
            raise ValueError("pairwise_matrix needs at least one sample")
        dims = {s.dim for s in samples}
        if len(dims) != 1:
            raise DimensionMismatch(min(dims), max(dims))
        points = np.array([s.features for s in samples], dtype=np.float64)

    if points.ndim != 2 or points.shape[0] == 0:
        raise ValueError("pairwise_matrix needs a nonempty 2-D point set")

    kernel = get_kernel(metric)
    n = points.shape[0]
    values = np.zeros((n, n), dtype=np.float64)
    # each cell is an independent kernel evaluation; mirror keeps symmetry exact
    for i in range(n - 1):
        values[i, i + 1 :] = kernel(points[i], points[i + 1 :])
        values[i + 1 :, i] = values[i, i + 1 :]
    return DistanceMatrix(values)


class DistanceOracle:
    """Row access to training distances, precomputed when the budget allows."""

    def __init__(
        self, points: NDArray[np.float64], metric: str, budget_bytes: int
    ) -> None:
        self.points = points
        self.metric = resolve_metric(metric)
        self._kernel = get_kernel(self.metric)
        n = points.shape[0]
        self.matrix: DistanceMatrix | None = None
        if n * n * 8 <= budget_bytes:
            self.matrix = pairwise_matrix(points, self.metric)

    @property
    def precomputed(self) -> bool:
        return self.matrix is not None

    def row(self, i: int) -> NDArray[np.float64]:
        if self.matrix is not None:
            return self.matrix.row(i)
        values = self._kernel(self.points[i], self.points)
        values[i] = 0.0
        return values
