from typing import Self

from pydantic import Field, field_validator, model_validator

from shared.schemas.base import BaseSchema, Technique


class DatasetEntry(BaseSchema):
    name: str = Field(..., min_length=1)
    path: str | None = Field(None, description="Path to a .ds file")
    metric: str = "euclidean"
    descriptor: str | None = Field(None, description="Descriptor that produced the vectors")

    @property
    def key(self) -> str:
        return f"{self.name}/{self.descriptor}" if self.descriptor else self.name


class ExperimentConfig(BaseSchema):
    datasets: list[DatasetEntry] = Field(..., min_length=1)
    techniques: list[Technique] = Field(
        default_factory=lambda: [Technique.CG_OPF, Technique.KNN_OPF, Technique.DISTANCE],
        min_length=1,
    )
    train_fractions: list[float] = Field(
        default_factory=lambda: [0.25, 0.5, 0.75], min_length=1
    )
    top_r: list[int] = Field(default_factory=lambda: [10, 15, 20], min_length=1)
    n_runs: int = Field(10, gt=0)
    base_seed: int = 0
    k_max: int = Field(20, gt=0)
    alpha: float = Field(0.05, gt=0.0, lt=1.0)
    timing: bool = False
    stratified: bool = False

    @field_validator("train_fractions")
    @classmethod
    def validate_fractions(cls, v: list[float]) -> list[float]:
        if any(not 0.0 < f < 1.0 for f in v):
            raise ValueError("train fractions must lie in (0, 1) to leave query samples")
        return sorted(set(v))

    @field_validator("top_r")
    @classmethod
    def validate_top_r(cls, v: list[int]) -> list[int]:
        if any(r < 1 for r in v):
            raise ValueError("top_r values must be positive")
        return sorted(set(v))

    @field_validator("techniques")
    @classmethod
    def dedupe_techniques(cls, v: list[Technique]) -> list[Technique]:
        return list(dict.fromkeys(v))

    @model_validator(mode="after")
    def validate_unique_datasets(self) -> Self:
        keys = [entry.key for entry in self.datasets]
        if len(set(keys)) != len(keys):
            raise ValueError("dataset name/descriptor pairs must be unique")
        return self


class CellResult(BaseSchema):
    dataset: str
    fraction: float
    technique: str
    top_r: int
    mean_ndcg: float
    mean_map: float
    mean_precision: float
    run_ndcg: list[float]
    run_map: list[float]
    run_precision: list[float]
    best_ndcg: bool = False
    best_map: bool = False


class Comparison(BaseSchema):
    dataset: str
    fraction: float
    top_r: int
    metric: str
    technique_a: str
    technique_b: str
    applicable: bool
    statistic: float | None = None
    p_value: float | None = None
    significant: bool = False


class TimingRecord(BaseSchema):
    dataset: str
    fraction: float
    technique: str
    mean_ranking_seconds: float
    mean_training_seconds: float
    run_ranking_seconds: list[float]


class ExperimentReport(BaseSchema):
    config: ExperimentConfig
    seed: int
    cells: list[CellResult]
    comparisons: list[Comparison]
    timings: list[TimingRecord] | None = None


class BenchmarkResult(BaseSchema):
    technique: str
    n_queries: int
    top_r: int
    repetitions: int
    timings: list[float]

    @property
    def mean(self) -> float:
        return sum(self.timings) / len(self.timings)

    @property
    def min(self) -> float:
        return min(self.timings)

    @property
    def max(self) -> float:
        return max(self.timings)
