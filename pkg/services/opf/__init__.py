# Optimum-path forest training and classification
from services.opf.cg import (
    build_mst,
    classify_cg,
    elect_prototypes,
    offered_costs_cg,
    train_cg,
)
from services.opf.common import Conquest
from services.opf.dispatch import classify, offered_costs, polarity_of
from services.opf.knn import (
    classify_knn,
    compute_density,
    knn_adjacency,
    offered_costs_knn,
    select_k,
    train_knn,
)

__all__ = [
    "Conquest",
    "build_mst",
    "classify",
    "classify_cg",
    "classify_knn",
    "compute_density",
    "elect_prototypes",
    "knn_adjacency",
    "offered_costs",
    "offered_costs_cg",
    "offered_costs_knn",
    "polarity_of",
    "select_k",
    "train_cg",
    "train_knn",
]
