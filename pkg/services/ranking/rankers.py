from typing import Protocol

import numpy as np
from numpy.typing import NDArray

from services.metricspace import distances_to, resolve_metric
from services.metricspace.distances import as_vector
from services.opf import offered_costs, polarity_of
from shared.errors import DimensionMismatch, InvalidParameter
from shared.schemas.base import Polarity, Technique, Variant
from shared.schemas.dataset import Dataset, LabeledSample
from shared.schemas.forest import TrainedForest
from shared.schemas.ranking import RankingEntry, RankingList


def _check_r(r: int) -> None:
    if r < 1:
        raise InvalidParameter(f"r must be at least 1, got {r}")


def _build(
    query_id: int,
    ids: NDArray[np.int64],
    scores: NDArray[np.float64],
    order: NDArray[np.int64],
    r: int,
    polarity: Polarity,
) -> RankingList:
    top = order[:r]
    return RankingList(
        query_id=query_id,
        entries=tuple(
            RankingEntry(candidate_id=int(ids[j]), score=float(scores[j]), rank=position)
            for position, j in enumerate(top, start=1)
        ),
        polarity=polarity,
        truncated=len(order) < r,
    )


def rank_opf(forest: TrainedForest, query: LabeledSample, r: int) -> RankingList:
    """Sort the path-costs the forest offers to the query and keep the r best.

    Score ties follow the settlement order so rank 1 is the classification
    conqueror.
    """
    _check_r(r)
    offered = offered_costs(forest, query.features)
    ids = np.array([sample_id for sample_id, _ in offered], dtype=np.int64)
    scores = np.array([score for _, score in offered], dtype=np.float64)
    settled = forest.settlement_rank[[forest.index_of[int(i)] for i in ids]]
    polarity = polarity_of(forest)
    key = scores if polarity == Polarity.LOWER_IS_BETTER else -scores
    order = np.lexsort((settled, key))
    return _build(query.id, ids, scores, order, r, polarity)


def rank_distance(
    train: Dataset, query: LabeledSample, r: int, metric: str = "euclidean"
) -> RankingList:
    _check_r(r)
    vector = as_vector(query)
    if vector.shape[0] != train.dim:
        raise DimensionMismatch(train.dim, vector.shape[0])
    scores = distances_to(vector, train.matrix, metric)
    order = np.lexsort((train.ids, scores))
    return _build(query.id, train.ids, scores, order, r, Polarity.LOWER_IS_BETTER)


class Ranker(Protocol):
    technique: str
    train: Dataset

    def rank(self, query: LabeledSample, r: int) -> RankingList: ...


class OpfRanker:
    def __init__(self, forest: TrainedForest) -> None:
        self.forest = forest
        self.train = forest.samples
        self.technique = Variant(forest.variant).technique.value

    def rank(self, query: LabeledSample, r: int) -> RankingList:
        return rank_opf(self.forest, query, r)


class DistanceRanker:
    def __init__(self, train: Dataset, metric: str = "euclidean") -> None:
        self.train = train
        self.metric = resolve_metric(metric)
        self.technique = Technique.DISTANCE.value

    def rank(self, query: LabeledSample, r: int) -> RankingList:
        return rank_distance(self.train, query, r, self.metric)


def rank_all(ranker: Ranker, queries: Dataset, r: int) -> list[RankingList]:
    return [ranker.rank(query, r) for query in queries.samples]
