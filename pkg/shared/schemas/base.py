from enum import StrEnum

from pydantic import BaseModel, ConfigDict


class BaseSchema(BaseModel):
    model_config = ConfigDict(
        from_attributes=True,
        populate_by_name=True,
        use_enum_values=True,
    )


class FrozenSchema(BaseSchema):
    model_config = ConfigDict(frozen=True)


class Technique(StrEnum):
    CG_OPF = "cg-opf"
    KNN_OPF = "knn-opf"
    DISTANCE = "distance"


class Variant(StrEnum):
    CG = "cg"
    KNN = "knn"

    @property
    def technique(self) -> Technique:
        return Technique.CG_OPF if self is Variant.CG else Technique.KNN_OPF


class Polarity(StrEnum):
    LOWER_IS_BETTER = "lower-is-better"
    HIGHER_IS_BETTER = "higher-is-better"
