# Shared Pydantic schemas
from shared.schemas.base import BaseSchema, FrozenSchema, Polarity, Technique, Variant
from shared.schemas.dataset import Dataset, LabeledSample, SplitPair
from shared.schemas.evaluation import RelevanceVector, SignificanceResult
from shared.schemas.experiment import (
    BenchmarkResult,
    CellResult,
    Comparison,
    DatasetEntry,
    ExperimentConfig,
    ExperimentReport,
    TimingRecord,
)
from shared.schemas.forest import (
    DensityField,
    KnnAdjacency,
    MstEdge,
    PrototypeSet,
    TrainedForest,
)
from shared.schemas.ranking import RankingEntry, RankingList

__all__ = [
    "BaseSchema",
    "FrozenSchema",
    "Polarity",
    "Technique",
    "Variant",
    "Dataset",
    "LabeledSample",
    "SplitPair",
    "RelevanceVector",
    "SignificanceResult",
    "BenchmarkResult",
    "CellResult",
    "Comparison",
    "DatasetEntry",
    "ExperimentConfig",
    "ExperimentReport",
    "TimingRecord",
    "DensityField",
    "KnnAdjacency",
    "MstEdge",
    "PrototypeSet",
    "TrainedForest",
    "RankingEntry",
    "RankingList",
]
