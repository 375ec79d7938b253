from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from services.dataset import build_dataset
from services.opf import classify, train_cg, train_knn
from services.ranking import (
    RANKING_HEADER,
    DistanceRanker,
    OpfRanker,
    load_rankings,
    rank_all,
    rank_distance,
    rank_opf,
    read_rankings,
    write_rankings,
)
from shared.errors import (
    DimensionMismatch,
    InvalidParameter,
    RankingFormatError,
    UnknownCandidate,
)
from shared.schemas.base import Polarity
from shared.schemas.dataset import Dataset, LabeledSample
from shared.schemas.forest import TrainedForest
from shared.schemas.ranking import RankingEntry, RankingList


def query(x: list[float], label: int = 0, sample_id: int = 100) -> LabeledSample:
    return LabeledSample(id=sample_id, label=label, features=tuple(x))


def scaled(ds: Dataset, factor: float) -> Dataset:
    return build_dataset(
        [(s.id, s.label, [factor * x for x in s.features]) for s in ds.samples],
        n_classes=ds.n_classes,
    )


class TestRankOpf:
    def test_toy_cg(self, toy_cg: TrainedForest) -> None:
        ranking = rank_opf(toy_cg, query([2.0]), 4)
        assert ranking.candidate_ids == [1, 2, 0, 3]
        assert [e.score for e in ranking.entries] == [1.0, 1.0, 2.0, 2.0]
        assert ranking.polarity == Polarity.LOWER_IS_BETTER
        assert not ranking.truncated

    def test_truncates_to_r(self, toy_cg: TrainedForest) -> None:
        ranking = rank_opf(toy_cg, query([2.0]), 2)
        assert ranking.candidate_ids == [1, 2]
        assert [e.rank for e in ranking.entries] == [1, 2]

    def test_knn_pool_is_k_nearest(self, toy_knn: TrainedForest) -> None:
        ranking = rank_opf(toy_knn, query([3.6]), 10)
        assert ranking.candidate_ids == [3]
        assert ranking.truncated
        assert ranking.polarity == Polarity.HIGHER_IS_BETTER

    def test_rank_one_is_conqueror(self, make_random) -> None:
        rng = np.random.default_rng(8)
        for seed in range(15):
            ds = make_random(seed, n=25, dim=3)
            for forest in (train_cg(ds), train_knn(ds, 4)):
                for _ in range(10):
                    point = rng.random(3).tolist()
                    top = rank_opf(forest, query(point), 1)
                    assert top.candidate_ids == [classify(forest, point).conqueror]

    def test_rank_one_is_conqueror_on_tied_costs(self, toy_cg: TrainedForest) -> None:
        for x in (0.5, 2.0, 3.0, 5.0):
            assert rank_opf(toy_cg, query([x]), 1).candidate_ids == [
                classify(toy_cg, [x]).conqueror
            ]

    def test_invalid_r(self, toy_cg: TrainedForest) -> None:
        with pytest.raises(InvalidParameter):
            rank_opf(toy_cg, query([2.0]), 0)

    def test_dimension_mismatch(self, toy_cg: TrainedForest) -> None:
        with pytest.raises(DimensionMismatch):
            rank_opf(toy_cg, query([2.0, 1.0]), 3)


class TestRankDistance:
    def test_toy(self, toy: Dataset) -> None:
        ranking = rank_distance(toy, query([2.0]), 4)
        assert ranking.candidate_ids == [1, 2, 0, 3]
        assert [e.score for e in ranking.entries] == [1.0, 1.0, 2.0, 2.0]

    def test_training_point_ranks_first(self, toy: Dataset) -> None:
        ranking = rank_distance(toy, query([3.0]), 2)
        assert ranking.entries[0].candidate_id == 2
        assert ranking.entries[0].score == 0.0

    def test_scores_nondecreasing(self, make_random) -> None:
        ds = make_random(1, n=30)
        scores = [e.score for e in rank_distance(ds, query([0.5, 0.5, 0.5]), 30).entries]
        assert scores == sorted(scores)

    def test_truncated_flag(self, toy: Dataset) -> None:
        assert rank_distance(toy, query([2.0]), 9).truncated

    def test_invalid_r(self, toy: Dataset) -> None:
        with pytest.raises(InvalidParameter):
            rank_distance(toy, query([2.0]), 0)


class TestRankingProperties:
    def test_prefix_consistency(self, make_random) -> None:
        ds = make_random(4, n=40)
        q = query([0.2, 0.7, 0.4])
        for ranker in (OpfRanker(train_cg(ds)), OpfRanker(train_knn(ds, 20)), DistanceRanker(ds)):
            assert ranker.rank(q, 10).entries == ranker.rank(q, 20).prefix(10).entries

    @pytest.mark.parametrize("factor", [2.0, 0.5])
    @pytest.mark.parametrize("metric", ["euclidean", "manhattan"])
    def test_positive_rescaling_keeps_order(
        self, make_random, factor: float, metric: str
    ) -> None:
        ds = make_random(6, n=30)
        big = scaled(ds, factor)
        point = [0.3, 0.6, 0.1]
        far = [factor * x for x in point]
        assert (
            rank_opf(train_cg(ds, metric), query(point), 30).candidate_ids
            == rank_opf(train_cg(big, metric), query(far), 30).candidate_ids
        )
        assert (
            rank_distance(ds, query(point), 30, metric).candidate_ids
            == rank_distance(big, query(far), 30, metric).candidate_ids
        )

    def test_rank_all(self, toy: Dataset) -> None:
        queries = build_dataset([(10, 0, [0.5]), (11, 1, [3.5])], n_classes=2)
        rankings = rank_all(DistanceRanker(toy), queries, 2)
        assert [r.query_id for r in rankings] == [10, 11]
        assert rankings[1].candidate_ids == [2, 3]

    def test_ranker_techniques(self, toy_cg: TrainedForest, toy_knn: TrainedForest, toy: Dataset) -> None:
        assert OpfRanker(toy_cg).technique == "cg-opf"
        assert OpfRanker(toy_knn).technique == "knn-opf"
        assert DistanceRanker(toy).technique == "distance"


class TestRankingList:
    def test_rejects_gaps_in_ranks(self) -> None:
        with pytest.raises(ValidationError):
            RankingList(
                query_id=0,
                entries=(RankingEntry(candidate_id=1, score=0.1, rank=2),),
                polarity=Polarity.LOWER_IS_BETTER,
            )

    def test_rejects_wrong_direction(self) -> None:
        with pytest.raises(ValidationError):
            RankingList(
                query_id=0,
                entries=(
                    RankingEntry(candidate_id=1, score=0.1, rank=1),
                    RankingEntry(candidate_id=2, score=0.5, rank=2),
                ),
                polarity=Polarity.HIGHER_IS_BETTER,
            )

    def test_rejects_duplicate_candidates(self) -> None:
        with pytest.raises(ValidationError):
            RankingList(
                query_id=0,
                entries=(
                    RankingEntry(candidate_id=1, score=0.1, rank=1),
                    RankingEntry(candidate_id=1, score=0.2, rank=2),
                ),
                polarity=Polarity.LOWER_IS_BETTER,
            )


class TestRankingCsv:
    def test_header_and_rows(self, toy_cg: TrainedForest, toy: Dataset) -> None:
        text = write_rankings([rank_opf(toy_cg, query([2.0]), 2)], toy.label_of())
        lines = text.splitlines()
        assert lines[0] == ",".join(RANKING_HEADER)
        assert lines[1:] == ["100,1,1,1.0,0", "100,2,2,1.0,1"]

    def test_round_trip(self, make_random) -> None:
        ds = make_random(2, n=20)
        forest = train_knn(ds, 5)
        rankings = [rank_opf(forest, query([0.1 * i, 0.5, 0.9], sample_id=i), 5) for i in range(5)]
        parsed = read_rankings(write_rankings(rankings, ds.label_of()))
        assert [r.query_id for r in parsed] == [r.query_id for r in rankings]
        for a, b in zip(parsed, rankings, strict=True):
            assert a.entries == b.entries

    def test_unknown_candidate(self, toy_cg: TrainedForest) -> None:
        with pytest.raises(UnknownCandidate):
            write_rankings([rank_opf(toy_cg, query([2.0]), 2)], {0: 0})

    def test_bad_header(self) -> None:
        with pytest.raises(RankingFormatError):
            read_rankings("query,rank\n1,1\n")

    def test_bad_row(self) -> None:
        content = ",".join(RANKING_HEADER) + "\n1,1,4,x,0\n"
        with pytest.raises(RankingFormatError) as exc_info:
            read_rankings(content)
        assert str(exc_info.value).startswith("line 2:")

    def test_nul_byte_is_a_format_error(self) -> None:
        content = ",".join(RANKING_HEADER) + "\n1,1,\x00,0.5,0\n"
        with pytest.raises(RankingFormatError) as exc_info:
            read_rankings(content)
        assert str(exc_info.value).startswith("line 2:")

    def test_oversized_field_is_a_format_error(self) -> None:
        content = ",".join(RANKING_HEADER) + "\n1,1,4,0.5,0\n2,1," + "9" * 200_000 + ",0.5,0\n"
        with pytest.raises(RankingFormatError):
            read_rankings(content)

    def test_load_rejects_undecodable_bytes(self, tmp_path: Path) -> None:
        path = tmp_path / "rankings.csv"
        path.write_bytes(",".join(RANKING_HEADER).encode() + b"\n1,1,4,\xfe,0\n")
        with pytest.raises(RankingFormatError) as exc_info:
            load_rankings(path)
        assert exc_info.value.line == 2
