from typing import Self

from pydantic import Field, model_validator

from shared.schemas.base import FrozenSchema, Polarity


class RankingEntry(FrozenSchema):
    candidate_id: int
    score: float
    rank: int = Field(..., ge=1)


class RankingList(FrozenSchema):
    query_id: int
    entries: tuple[RankingEntry, ...]
    polarity: Polarity
    truncated: bool = False

    @model_validator(mode="after")
    def validate_order(self) -> Self:
        ids = [e.candidate_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("candidate ids must be unique")
        for position, entry in enumerate(self.entries, start=1):
            if entry.rank != position:
                raise ValueError("ranks must be consecutive from 1")
        scores = [e.score for e in self.entries]
        pairs = list(zip(scores, scores[1:], strict=False))
        if self.polarity == Polarity.LOWER_IS_BETTER:
            monotone = all(a <= b for a, b in pairs)
        else:
            monotone = all(a >= b for a, b in pairs)
        if not monotone:
            raise ValueError(f"scores are not monotone for polarity {self.polarity}")
        return self

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def candidate_ids(self) -> list[int]:
        return [e.candidate_id for e in self.entries]

    def prefix(self, r: int) -> "RankingList":
        return RankingList(
            query_id=self.query_id,
            entries=self.entries[:r],
            polarity=self.polarity,
            truncated=self.truncated or len(self.entries) < r,
        )
