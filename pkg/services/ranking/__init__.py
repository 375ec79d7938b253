# Top-r ranking lists from OPF path-costs and from raw distances
from services.ranking.csv_io import (
    RANKING_HEADER,
    load_rankings,
    read_rankings,
    write_rankings,
)
from services.ranking.rankers import (
    DistanceRanker,
    OpfRanker,
    Ranker,
    rank_all,
    rank_distance,
    rank_opf,
)

__all__ = [
    "RANKING_HEADER",
    "load_rankings",
    "read_rankings",
    "write_rankings",
    "DistanceRanker",
    "OpfRanker",
    "Ranker",
    "rank_all",
    "rank_distance",
    "rank_opf",
]
