# Distance functions shared by graph training, classification and ranking
from services.metricspace.distances import (
    DistanceMatrix,
    DistanceOracle,
    MetricId,
    available_metrics,
    distance,
    distances_to,
    pairwise_matrix,
    register_metric,
    resolve_metric,
)

__all__ = [
    "DistanceMatrix",
    "DistanceOracle",
    "MetricId",
    "available_metrics",
    "distance",
    "distances_to",
    "pairwise_matrix",
    "register_metric",
    "resolve_metric",
]
