import numpy as np
import pytest

from services.metricspace import (
    DistanceOracle,
    MetricId,
    available_metrics,
    distance,
    distances_to,
    pairwise_matrix,
    register_metric,
    resolve_metric,
)
from shared.errors import DimensionMismatch, UnknownMetric
from shared.schemas.dataset import Dataset


class TestDistance:
    def test_euclidean(self) -> None:
        assert distance([0.0, 0.0], [3.0, 4.0]) == 5.0

    def test_manhattan(self) -> None:
        assert distance([0.0, 0.0], [3.0, -4.0], MetricId.MANHATTAN) == 7.0

    def test_squared_euclidean(self) -> None:
        assert distance([1.0, 1.0], [4.0, 5.0], "sqeuclidean") == 25.0

    def test_symmetric_and_zero_on_identity(self, make_random) -> None:
        ds = make_random(0, n=5, dim=6)
        for metric in available_metrics():
            for a in ds.matrix:
                assert distance(a, a, metric) == 0.0
                for b in ds.matrix:
                    assert distance(a, b, metric) == distance(b, a, metric)

    @pytest.mark.parametrize(
        ("metric", "power"),
        [("euclidean", 1), ("manhattan", 1), ("sqeuclidean", 2)],
    )
    def test_rescaling(self, make_random, metric: str, power: int) -> None:
        rng = np.random.default_rng(17)
        ds = make_random(5, n=8, dim=4)
        for c in rng.uniform(0.01, 100.0, size=10):
            for a, b in zip(ds.matrix, ds.matrix[::-1], strict=True):
                expected = c**power * distance(a, b, metric)
                assert distance(c * a, c * b, metric) == pytest.approx(expected, rel=1e-12)

    def test_dimension_mismatch(self) -> None:
        with pytest.raises(DimensionMismatch):
            distance([1.0], [1.0, 2.0])
        with pytest.raises(DimensionMismatch):
            distances_to([1.0], np.zeros((3, 2)), "euclidean")


class TestMetricRegistry:
    def test_resolve_is_case_insensitive(self) -> None:
        assert resolve_metric("Euclidean") == "euclidean"

    def test_alias(self) -> None:
        assert resolve_metric("squared-euclidean") == "sqeuclidean"

    def test_unknown_metric(self) -> None:
        with pytest.raises(UnknownMetric):
            resolve_metric("cosine")

    def test_register_metric(self) -> None:
        name = "chebyshev-test"
        register_metric(name, lambda a, block: np.max(np.abs(block - a), axis=1))
        assert name in available_metrics()
        assert distance([0.0, 0.0], [3.0, -7.0], name) == 7.0
        with pytest.raises(ValueError):
            register_metric(name, lambda a, block: block[:, 0])


class TestPairwiseMatrix:
    def test_toy(self, toy: Dataset) -> None:
        matrix = pairwise_matrix(toy)
        assert matrix.n == 4
        assert matrix.tolist()[0] == [0.0, 1.0, 3.0, 4.0]
        assert matrix[1, 2] == 2.0

    def test_symmetric_with_zero_diagonal(self, make_random) -> None:
        values = pairwise_matrix(make_random(1, n=15), MetricId.MANHATTAN).values
        assert (values == values.T).all()
        assert (np.diag(values) == 0.0).all()

    def test_symmetric_over_random_datasets(self, make_random) -> None:
        for seed in range(50):
            ds = make_random(seed, n=4 + seed % 13, dim=1 + seed % 6)
            for metric in available_metrics():
                values = pairwise_matrix(ds, metric).values
                assert (values == values.T).all()
                assert (np.diag(values) == 0.0).all()

    def test_read_only(self, toy: Dataset) -> None:
        with pytest.raises(ValueError):
            pairwise_matrix(toy).values[0, 1] = 5.0

    def test_matches_query_distances_exactly(self, make_random) -> None:
        ds = make_random(2, n=10, dim=5)
        matrix = pairwise_matrix(ds)
        for i, point in enumerate(ds.matrix):
            assert (distances_to(point, ds.matrix, "euclidean") == matrix.row(i)).all()


class TestDistanceOracle:
    def test_precomputed_and_on_demand_rows_agree(self, make_random) -> None:
        ds = make_random(4, n=12, dim=3)
        full = DistanceOracle(ds.matrix, "euclidean", budget_bytes=1 << 20)
        lazy = DistanceOracle(ds.matrix, "euclidean", budget_bytes=0)
        assert full.precomputed
        assert not lazy.precomputed
        for i in range(len(ds)):
            assert (full.row(i) == lazy.row(i)).all()
