import math

import numpy as np
import structlog
from numpy.typing import NDArray

from shared.errors import InfeasibleSplit, InvalidParameter
from shared.schemas.dataset import Dataset, SplitPair

logger = structlog.get_logger(__name__)

_SEED_MASK = (1 << 64) - 1


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed & _SEED_MASK)


def _target_size(fraction: float, n: int) -> int:
    return min(max(math.floor(fraction * n + 0.5), 1), n)


def _random_indices(
    labels: NDArray[np.int64], n_train: int, rng: np.random.Generator
) -> set[int]:
    n = len(labels)
    chosen = set(rng.permutation(n)[:n_train].tolist())

    # move one sample of every absent class into train
    for cls in sorted(set(labels.tolist())):
        train_counts = np.bincount(labels[sorted(chosen)], minlength=int(labels.max()) + 1)
        if train_counts[cls] > 0:
            continue
        incoming = np.flatnonzero(labels == cls)
        donors = np.array(
            sorted(i for i in chosen if train_counts[labels[i]] > 1), dtype=np.int64
        )
        take = int(incoming[rng.integers(len(incoming))])
        give = int(donors[rng.integers(len(donors))])
        chosen.discard(give)
        chosen.add(take)
        logger.debug("Split repaired class coverage", cls=cls, moved_in=take, moved_out=give)
    return chosen


def _stratified_indices(
    labels: NDArray[np.int64], fraction: float, rng: np.random.Generator
) -> set[int]:
    chosen: set[int] = set()
    for cls in sorted(set(labels.tolist())):
        members = np.flatnonzero(labels == cls)
        count = _target_size(fraction, len(members))
        chosen.update(rng.permutation(members)[:count].tolist())
    return chosen


def split_dataset(
    ds: Dataset, train_fraction: float, seed: int, stratified: bool = False
) -> SplitPair:
    if not 0.0 < train_fraction <= 1.0:
        raise InvalidParameter(f"train fraction must lie in (0, 1], got {train_fraction}")

    n = len(ds)
    n_classes = len(ds.classes_present())
    n_train = _target_size(train_fraction, n)
    if n_train < n_classes:
        raise InfeasibleSplit(
            f"fraction {train_fraction} keeps {n_train} of {n} samples, "
            f"fewer than the {n_classes} classes"
        )

    rng = _rng(seed)
    labels = ds.labels
    if stratified:
        chosen = _stratified_indices(labels, train_fraction, rng)
    else:
        chosen = _random_indices(labels, n_train, rng)

    ids = ds.ids
    train_ids = {int(ids[i]) for i in chosen}
    query_ids = {int(sample_id) for sample_id in ids} - train_ids
    return SplitPair(
        train=ds.subset(train_ids),
        queries=ds.subset(query_ids),
        seed=seed,
        train_fraction=train_fraction,
    )


def holdout_runs(
    ds: Dataset,
    train_fraction: float,
    base_seed: int,
    n_runs: int,
    stratified: bool = False,
) -> list[SplitPair]:
    if n_runs < 1:
        raise InvalidParameter(f"n_runs must be positive, got {n_runs}")
    return [
        split_dataset(ds, train_fraction, base_seed + i, stratified)
        for i in range(n_runs)
    ]
