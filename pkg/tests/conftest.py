from collections.abc import Callable

import numpy as np
import pytest

from scripts.make_blobs import make_blobs
from services.dataset import build_dataset, parse_dataset
from services.opf import train_cg, train_knn
from shared.config import OpfrConfig
from shared.schemas.dataset import Dataset
from shared.schemas.forest import TrainedForest

TOY_1D = "4 2 1\n0 0 0.0\n1 0 1.0\n2 1 3.0\n3 1 4.0\n"

RandomDataset = Callable[..., Dataset]


def random_dataset(
    seed: int, n: int = 20, dim: int = 3, n_classes: int = 3
) -> Dataset:
    """Uniform points with every class present at least once."""
    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(n) % n_classes)
    points = rng.random((n, dim))
    return build_dataset(
        [(i, int(labels[i]), points[i].tolist()) for i in range(n)],
        n_classes=n_classes,
    )


@pytest.fixture(scope="session")
def config() -> OpfrConfig:
    return OpfrConfig(log_format="console", log_level="debug")


@pytest.fixture
def toy_content() -> str:
    return TOY_1D


@pytest.fixture
def toy() -> Dataset:
    return parse_dataset(TOY_1D)


@pytest.fixture
def toy_cg(toy: Dataset) -> TrainedForest:
    return train_cg(toy)


@pytest.fixture
def toy_knn(toy: Dataset) -> TrainedForest:
    return train_knn(toy, k=1)


@pytest.fixture(scope="session")
def blobs() -> Dataset:
    return make_blobs(n_per_class=50, n_classes=4, dim=2, spread=1.0, separation=20.0, seed=7)


@pytest.fixture
def make_random() -> RandomDataset:
    return random_dataset
