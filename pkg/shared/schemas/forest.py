from functools import cached_property
from typing import Self

import numpy as np
from numpy.typing import NDArray
from pydantic import Field, model_validator

from shared.schemas.base import FrozenSchema, Variant
from shared.schemas.dataset import Dataset


class MstEdge(FrozenSchema):
    u: int
    v: int
    weight: float = Field(..., ge=0.0)


class PrototypeSet(FrozenSchema):
    ids: frozenset[int] = Field(..., min_length=1)

    def __contains__(self, sample_id: object) -> bool:
        return sample_id in self.ids

    def __len__(self) -> int:
        return len(self.ids)


class KnnAdjacency(FrozenSchema):
    k: int = Field(..., gt=0, description="Effective k after clamping to n-1")
    ids: tuple[int, ...]
    neighbors: tuple[tuple[tuple[int, float], ...], ...]

    @property
    def d_max(self) -> float:
        return max((d for row in self.neighbors for _, d in row), default=0.0)

    def symmetric_closure(self) -> list[list[int]]:
        """Neighbor indices per node of the undirected version of the k-NN graph."""
        index_of = {sample_id: i for i, sample_id in enumerate(self.ids)}
        closure: list[set[int]] = [set() for _ in self.ids]
        for i, row in enumerate(self.neighbors):
            for neighbor_id, _ in row:
                j = index_of[neighbor_id]
                closure[i].add(j)
                closure[j].add(i)
        return [sorted(adjacent) for adjacent in closure]


class DensityField(FrozenSchema):
    rho: tuple[float, ...]
    sigma: float = Field(..., gt=0.0)
    d_max: float = Field(..., gt=0.0)
    k: int = Field(..., gt=0)

    @model_validator(mode="after")
    def validate_sigma(self) -> Self:
        if self.sigma != self.d_max / 3:
            raise ValueError("sigma must equal d_max / 3")
        return self


class TrainedForest(FrozenSchema):
    """Outcome of OPF training, per node in dataset (id) order.

    ``order`` lists node ids in the order the competition settled them;
    classification and ranking break ties by that order.
    """

    variant: Variant
    metric: str
    samples: Dataset
    cost: tuple[float, ...]
    pred: tuple[int | None, ...]
    root: tuple[int, ...]
    prototypes: PrototypeSet
    order: tuple[int, ...]
    k: int | None = None
    density: DensityField | None = None

    @model_validator(mode="after")
    def validate_shape(self) -> Self:
        n = len(self.samples)
        for name in ("cost", "pred", "root", "order"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} must have one entry per training sample")
        if sorted(self.order) != [s.id for s in self.samples.samples]:
            raise ValueError("order must be a permutation of the training ids")
        if self.variant == Variant.KNN and (self.k is None or self.density is None):
            raise ValueError("k-NN forests require k and density")
        return self

    @property
    def n(self) -> int:
        return len(self.samples)

    @cached_property
    def index_of(self) -> dict[int, int]:
        return {s.id: i for i, s in enumerate(self.samples.samples)}

    @cached_property
    def label(self) -> tuple[int, ...]:
        true_label = self.samples.label_of()
        return tuple(true_label[r] for r in self.root)

    @cached_property
    def settlement_rank(self) -> NDArray[np.int64]:
        """Position of every node (by index) in the settlement order."""
        rank = np.empty(self.n, dtype=np.int64)
        for position, sample_id in enumerate(self.order):
            rank[self.index_of[sample_id]] = position
        return rank

    @cached_property
    def cost_array(self) -> NDArray[np.float64]:
        values = np.array(self.cost, dtype=np.float64)
        values.setflags(write=False)
        return values
