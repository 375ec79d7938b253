import math
from functools import cached_property
from typing import Self

import numpy as np
from numpy.typing import NDArray
from pydantic import Field, field_validator, model_validator

from shared.schemas.base import FrozenSchema


class LabeledSample(FrozenSchema):
    id: int = Field(..., ge=0, description="Sample id, unique within a dataset")
    label: int = Field(..., ge=0, description="Class id in [0, n_classes)")
    features: tuple[float, ...] = Field(..., min_length=1)

    @field_validator("features")
    @classmethod
    def validate_finite(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not all(math.isfinite(x) for x in v):
            raise ValueError("features must be finite")
        return v

    @property
    def dim(self) -> int:
        return len(self.features)


class Dataset(FrozenSchema):
    """Labeled feature vectors kept in ascending id order.

    Construction checks structure only; class coverage is checked by
    ``require_complete`` because query sides of a split may miss classes.
    """

    samples: tuple[LabeledSample, ...]
    n_classes: int = Field(..., gt=0)
    dim: int = Field(..., gt=0)

    @field_validator("samples")
    @classmethod
    def sort_by_id(cls, v: tuple[LabeledSample, ...]) -> tuple[LabeledSample, ...]:
        return tuple(sorted(v, key=lambda s: s.id))

    @model_validator(mode="after")
    def validate_structure(self) -> Self:
        seen: set[int] = set()
        for sample in self.samples:
            if sample.dim != self.dim:
                raise ValueError(
                    f"sample {sample.id} has dimension {sample.dim}, expected {self.dim}"
                )
            if sample.label >= self.n_classes:
                raise ValueError(
                    f"sample {sample.id} has label {sample.label} outside [0, {self.n_classes})"
                )
            if sample.id in seen:
                raise ValueError(f"duplicate sample id {sample.id}")
            seen.add(sample.id)
        return self

    def __len__(self) -> int:
        return len(self.samples)

    @cached_property
    def ids(self) -> NDArray[np.int64]:
        return np.array([s.id for s in self.samples], dtype=np.int64)

    @cached_property
    def labels(self) -> NDArray[np.int64]:
        return np.array([s.label for s in self.samples], dtype=np.int64)

    @cached_property
    def matrix(self) -> NDArray[np.float64]:
        values = np.array([s.features for s in self.samples], dtype=np.float64)
        values = values.reshape(len(self.samples), self.dim)
        values.setflags(write=False)
        return values

    def label_of(self) -> dict[int, int]:
        return {s.id: s.label for s in self.samples}

    def classes_present(self) -> set[int]:
        return {s.label for s in self.samples}

    def subset(self, ids: set[int]) -> "Dataset":
        return Dataset(
            samples=tuple(s for s in self.samples if s.id in ids),
            n_classes=self.n_classes,
            dim=self.dim,
        )


class SplitPair(FrozenSchema):
    train: Dataset
    queries: Dataset
    seed: int
    train_fraction: float = Field(..., gt=0.0, le=1.0)
