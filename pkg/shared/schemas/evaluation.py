from typing import Literal

from pydantic import Field, field_validator

from shared.schemas.base import FrozenSchema


class RelevanceVector(FrozenSchema):
    rel: tuple[int, ...] = Field(
        ..., description="Binary relevance; entry i refers to rank i+1"
    )

    @field_validator("rel")
    @classmethod
    def validate_binary(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if any(x not in (0, 1) for x in v):
            raise ValueError("relevance values must be 0 or 1")
        return v

    def __len__(self) -> int:
        return len(self.rel)


class SignificanceResult(FrozenSchema):
    statistic: float = Field(..., ge=0.0, description="Sum of positive-difference ranks")
    n_effective: int = Field(..., gt=0)
    p_value: float = Field(..., ge=0.0, le=1.0)
    significant: bool
    alpha: float
    method: Literal["exact", "normal"]
