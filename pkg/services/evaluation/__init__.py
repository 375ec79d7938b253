# Relevance judging, ranking quality measures and paired significance testing
from services.evaluation.metrics import (
    QueryScores,
    average_precision,
    dcg,
    judge_relevance,
    mean_average_precision,
    ndcg,
    precision_at,
    score_ranking,
)
from services.evaluation.significance import wilcoxon_signed_rank

__all__ = [
    "QueryScores",
    "average_precision",
    "dcg",
    "judge_relevance",
    "mean_average_precision",
    "ndcg",
    "precision_at",
    "score_ranking",
    "wilcoxon_signed_rank",
]
