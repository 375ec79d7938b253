import time

import structlog

from services.ranking import Ranker
from shared.errors import InvalidParameter
from shared.metrics import QUERIES_RANKED, RANKING_DURATION
from shared.schemas.dataset import Dataset
from shared.schemas.experiment import BenchmarkResult

logger = structlog.get_logger(__name__)


def _rank_once(ranker: Ranker, queries: Dataset, r: int) -> float:
    started = time.perf_counter()
    for query in queries.samples:
        ranker.rank(query, r)
    return time.perf_counter() - started


def benchmark(
    ranker: Ranker,
    queries: Dataset,
    r: int,
    repetitions: int = 10,
    warmup: bool = True,
) -> BenchmarkResult:
    """Wall-clock the ranking of every query, once per repetition."""
    if repetitions < 1:
        raise InvalidParameter(f"repetitions must be positive, got {repetitions}")
    if r < 1:
        raise InvalidParameter(f"r must be at least 1, got {r}")

    if warmup:
        _rank_once(ranker, queries, r)

    timings = []
    for _ in range(repetitions):
        seconds = _rank_once(ranker, queries, r)
        RANKING_DURATION.labels(technique=ranker.technique).observe(seconds)
        QUERIES_RANKED.labels(technique=ranker.technique).inc(len(queries))
        timings.append(seconds)

    result = BenchmarkResult(
        technique=ranker.technique,
        n_queries=len(queries),
        top_r=r,
        repetitions=repetitions,
        timings=timings,
    )
    logger.info(
        "Benchmark finished",
        technique=ranker.technique,
        queries=len(queries),
        mean_seconds=round(result.mean, 6),
    )
    return result


def format_benchmark(results: list[BenchmarkResult]) -> str:
    lines = []
    for result in results:
        lines.append(
            f"{result.technique}: queries={result.n_queries} r={result.top_r} "
            f"reps={result.repetitions} mean={result.mean:.6f}s "
            f"min={result.min:.6f}s max={result.max:.6f}s"
        )
    by_technique = {result.technique: result for result in results}
    baseline = by_technique.pop("distance", None)
    for technique, result in by_technique.items():
        if baseline is not None and result.mean > 0:
            lines.append(f"distance/{technique} ratio: {baseline.mean / result.mean:.3f}")
    return "\n".join(lines) + "\n"
