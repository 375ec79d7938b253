from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from services.metricspace import distances_to
from services.metricspace.distances import as_vector
from shared.config import get_config
from shared.errors import DimensionMismatch
from shared.schemas.forest import TrainedForest


class Conquest(NamedTuple):
    label: int
    cost: float
    conqueror: int


def budget_or_default(budget_bytes: int | None) -> int:
    if budget_bytes is None:
        return get_config().distance_matrix_budget_bytes
    return budget_bytes


def query_distances(forest: TrainedForest, features: ArrayLike) -> NDArray[np.float64]:
    query = as_vector(features)
    if query.shape[0] != forest.samples.dim:
        raise DimensionMismatch(forest.samples.dim, query.shape[0])
    return distances_to(query, forest.samples.matrix, forest.metric)


def first_in_settlement_order(
    forest: TrainedForest, candidates: NDArray[np.int64], values: NDArray[np.float64]
) -> int:
    """Index among ``candidates`` holding the smallest value, earliest settled first."""
    ranks = forest.settlement_rank[candidates]
    return int(np.lexsort((ranks, values))[0])
