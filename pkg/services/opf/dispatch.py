from numpy.typing import ArrayLike

from services.opf.cg import classify_cg, offered_costs_cg
from services.opf.common import Conquest
from services.opf.knn import classify_knn, offered_costs_knn
from shared.schemas.base import Polarity, Variant
from shared.schemas.forest import TrainedForest


def classify(forest: TrainedForest, features: ArrayLike) -> Conquest:
    if forest.variant == Variant.CG:
        return classify_cg(forest, features)
    return classify_knn(forest, features)


def offered_costs(forest: TrainedForest, features: ArrayLike) -> list[tuple[int, float]]:
    if forest.variant == Variant.CG:
        return offered_costs_cg(forest, features)
    return offered_costs_knn(forest, features)


def polarity_of(forest: TrainedForest) -> Polarity:
    if forest.variant == Variant.CG:
        return Polarity.LOWER_IS_BETTER
    return Polarity.HIGHER_IS_BETTER
