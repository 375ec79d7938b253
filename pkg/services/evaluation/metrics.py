from collections.abc import Mapping, Sequence
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from shared.errors import EmptyInput, RankOutOfRange, UnknownCandidate
from shared.schemas.evaluation import RelevanceVector
from shared.schemas.ranking import RankingList


class QueryScores(NamedTuple):
    ndcg: float
    average_precision: float
    precision: float


def judge_relevance(
    ranking: RankingList, query_label: int, labels: Mapping[int, int]
) -> RelevanceVector:
    rel = []
    for candidate_id in ranking.candidate_ids:
        if candidate_id not in labels:
            raise UnknownCandidate(f"candidate {candidate_id} has no known label")
        rel.append(int(labels[candidate_id] == query_label))
    return RelevanceVector(rel=tuple(rel))


def _gains(rel: RelevanceVector | Sequence[int]) -> NDArray[np.float64]:
    values = rel.rel if isinstance(rel, RelevanceVector) else tuple(rel)
    return np.asarray(values, dtype=np.float64)


def dcg(rel: RelevanceVector | Sequence[int]) -> float:
    """sum over 1-based positions i of (2^rel_i - 1) / log2(i + 1)."""
    r = _gains(rel)
    if r.size == 0:
        return 0.0
    discounts = np.log2(np.arange(2, r.size + 2))
    return float(np.sum((np.power(2.0, r) - 1.0) / discounts))


def ndcg(rel: RelevanceVector | Sequence[int]) -> float:
    r = _gains(rel)
    ideal = dcg(np.sort(r)[::-1].astype(int).tolist())
    if ideal == 0.0:
        return 0.0
    return dcg(r.astype(int).tolist()) / ideal


def precision_at(rel: RelevanceVector | Sequence[int], r: int) -> float:
    values = _gains(rel)
    if not 1 <= r <= values.size:
        raise RankOutOfRange(f"r={r} outside 1..{values.size}")
    return float(np.sum(values[:r]) / r)


def average_precision(rel: RelevanceVector | Sequence[int]) -> float:
    r = _gains(rel)
    hits = r != 0
    if not hits.any():
        return 0.0
    precisions = np.cumsum(r) / np.arange(1, r.size + 1)
    return float(np.mean(precisions[hits]))


def mean_average_precision(aps: Sequence[float]) -> float:
    if len(aps) == 0:
        raise EmptyInput("mean average precision needs at least one query")
    return float(np.mean(aps))


def score_ranking(
    ranking: RankingList,
    query_label: int,
    labels: Mapping[int, int],
    r: int | None = None,
) -> QueryScores:
    rel = judge_relevance(ranking, query_label, labels)
    # positions missing from a truncated list count as non-relevant
    cutoff = r if r is not None else len(ranking)
    precision = float(sum(rel.rel)) / cutoff if cutoff > 0 else 0.0
    return QueryScores(
        ndcg=ndcg(rel),
        average_precision=average_precision(rel),
        precision=precision,
    )
