import itertools
import time
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
import structlog

from services.dataset import holdout_runs, load_dataset, require_complete
from services.evaluation import (
    mean_average_precision,
    score_ranking,
    wilcoxon_signed_rank,
)
from services.opf import select_k, train_cg, train_knn
from services.ranking import DistanceRanker, OpfRanker, Ranker
from shared.config import OpfrConfig, get_config
from shared.errors import ExperimentError, NotApplicable, OpfrError
from shared.metrics import QUERIES_RANKED, RANKING_DURATION
from shared.schemas.base import Technique
from shared.schemas.dataset import Dataset, SplitPair
from shared.schemas.experiment import (
    CellResult,
    Comparison,
    DatasetEntry,
    ExperimentConfig,
    ExperimentReport,
    TimingRecord,
)

logger = structlog.get_logger(__name__)

REPORTED_METRICS = ("ndcg", "map")


@dataclass
class _RunValues:
    ndcg: list[float] = field(default_factory=list)
    map: list[float] = field(default_factory=list)
    precision: list[float] = field(default_factory=list)

    def of(self, metric: str) -> list[float]:
        values: list[float] = getattr(self, metric)
        return values


@dataclass
class _RunTimes:
    ranking: list[float] = field(default_factory=list)
    training: list[float] = field(default_factory=list)


def _mean(values: list[float]) -> float:
    return float(np.mean(values))


class ExperimentRunner:
    """Hold-out protocol: splits x techniques x top-r for every dataset entry."""

    def __init__(self, cfg: ExperimentConfig, config: OpfrConfig | None = None) -> None:
        self.cfg = cfg
        self.config = config or get_config()

    def _load(self, entry: DatasetEntry, provided: Mapping[str, Dataset]) -> Dataset:
        if entry.key in provided:
            return require_complete(provided[entry.key])
        if entry.path is None:
            raise ExperimentError("dataset has neither a path nor in-memory data", dataset=entry.key)
        try:
            return require_complete(load_dataset(entry.path))
        except (OSError, OpfrError) as exc:
            raise ExperimentError(f"cannot load {entry.path}: {exc}", dataset=entry.key) from exc

    def _train(
        self, technique: str, split: SplitPair, metric: str
    ) -> tuple[Ranker, float]:
        started = time.perf_counter()
        ranker: Ranker
        if technique == Technique.CG_OPF:
            ranker = OpfRanker(
                train_cg(split.train, metric, self.config.distance_matrix_budget_bytes)
            )
        elif technique == Technique.KNN_OPF:
            budget = self.config.distance_matrix_budget_bytes
            k = select_k(split.train, self.cfg.k_max, metric, budget)
            ranker = OpfRanker(train_knn(split.train, k, metric, budget))
        else:
            ranker = DistanceRanker(split.train, metric)
        return ranker, time.perf_counter() - started

    def _run_technique(
        self,
        technique: str,
        split: SplitPair,
        metric: str,
        values: dict[int, _RunValues],
        times: _RunTimes,
    ) -> None:
        ranker, training_seconds = self._train(technique, split, metric)
        r_max = max(self.cfg.top_r)
        labels = split.train.label_of()

        started = time.perf_counter()
        rankings = [ranker.rank(query, r_max) for query in split.queries.samples]
        ranking_seconds = time.perf_counter() - started
        RANKING_DURATION.labels(technique=technique).observe(ranking_seconds)
        QUERIES_RANKED.labels(technique=technique).inc(len(rankings))

        for r in self.cfg.top_r:
            scores = [
                score_ranking(ranking.prefix(r), query.label, labels, r)
                for ranking, query in zip(rankings, split.queries.samples, strict=True)
            ]
            run = values[r]
            run.ndcg.append(_mean([s.ndcg for s in scores]))
            run.map.append(mean_average_precision([s.average_precision for s in scores]))
            run.precision.append(_mean([s.precision for s in scores]))

        times.ranking.append(ranking_seconds)
        times.training.append(training_seconds)

    def _compare(
        self,
        key: str,
        fraction: float,
        results: dict[str, dict[int, _RunValues]],
    ) -> list[Comparison]:
        comparisons = []
        for a, b in itertools.combinations(self.cfg.techniques, 2):
            for r in self.cfg.top_r:
                for metric in REPORTED_METRICS:
                    comparison = Comparison(
                        dataset=key,
                        fraction=fraction,
                        top_r=r,
                        metric=metric,
                        technique_a=a,
                        technique_b=b,
                        applicable=False,
                    )
                    try:
                        result = wilcoxon_signed_rank(
                            results[a][r].of(metric),
                            results[b][r].of(metric),
                            alpha=self.cfg.alpha,
                            exact_threshold=self.config.wilcoxon_exact_threshold,
                        )
                    except NotApplicable:
                        comparisons.append(comparison)
                        continue
                    comparisons.append(
                        comparison.model_copy(
                            update={
                                "applicable": True,
                                "statistic": result.statistic,
                                "p_value": result.p_value,
                                "significant": result.significant,
                            }
                        )
                    )
        return comparisons

    def _cells(
        self,
        key: str,
        fraction: float,
        results: dict[str, dict[int, _RunValues]],
        comparisons: list[Comparison],
    ) -> list[CellResult]:
        # NotApplicable comparisons carry significant=False
        verdicts = {
            (c.top_r, c.metric, frozenset((c.technique_a, c.technique_b))): c.significant
            for c in comparisons
        }

        cells = []
        for technique in self.cfg.techniques:
            for r in self.cfg.top_r:
                run = results[technique][r]
                cells.append(
                    CellResult(
                        dataset=key,
                        fraction=fraction,
                        technique=technique,
                        top_r=r,
                        mean_ndcg=_mean(run.ndcg),
                        mean_map=_mean(run.map),
                        mean_precision=_mean(run.precision),
                        run_ndcg=run.ndcg,
                        run_map=run.map,
                        run_precision=run.precision,
                    )
                )

        for r in self.cfg.top_r:
            row = [c for c in cells if c.top_r == r]
            for metric in REPORTED_METRICS:
                attr = f"mean_{metric}"
                best = max(row, key=lambda c: getattr(c, attr))
                for cell in row:
                    pair = frozenset((best.technique, cell.technique))
                    if cell is best or not verdicts.get((r, metric, pair), False):
                        setattr(cell, f"best_{metric}", True)
        return cells

    def run(self, datasets: Mapping[str, Dataset] | None = None) -> ExperimentReport:
        provided = datasets or {}
        cells: list[CellResult] = []
        comparisons: list[Comparison] = []
        timings: list[TimingRecord] = []

        for entry in self.cfg.datasets:
            ds = self._load(entry, provided)
            for fraction in self.cfg.train_fractions:
                with structlog.contextvars.bound_contextvars(
                    dataset=entry.key, fraction=fraction
                ):
                    results, times = self._run_fraction(entry, ds, fraction)
                fraction_comparisons = self._compare(entry.key, fraction, results)
                comparisons += fraction_comparisons
                cells += self._cells(entry.key, fraction, results, fraction_comparisons)
                if self.cfg.timing:
                    timings += [
                        TimingRecord(
                            dataset=entry.key,
                            fraction=fraction,
                            technique=technique,
                            mean_ranking_seconds=_mean(times[technique].ranking),
                            mean_training_seconds=_mean(times[technique].training),
                            run_ranking_seconds=times[technique].ranking,
                        )
                        for technique in self.cfg.techniques
                    ]

        return ExperimentReport(
            config=self.cfg,
            seed=self.cfg.base_seed,
            cells=cells,
            comparisons=comparisons,
            timings=timings if self.cfg.timing else None,
        )

    def _run_fraction(
        self, entry: DatasetEntry, ds: Dataset, fraction: float
    ) -> tuple[dict[str, dict[int, _RunValues]], dict[str, _RunTimes]]:
        results = {t: {r: _RunValues() for r in self.cfg.top_r} for t in self.cfg.techniques}
        times = {t: _RunTimes() for t in self.cfg.techniques}

        try:
            splits = holdout_runs(
                ds, fraction, self.cfg.base_seed, self.cfg.n_runs, self.cfg.stratified
            )
        except OpfrError as exc:
            raise ExperimentError(str(exc), dataset=entry.key) from exc

        for run, split in enumerate(splits):
            if len(split.queries) == 0:
                raise ExperimentError(
                    f"split at fraction {fraction} leaves no query samples",
                    dataset=entry.key,
                    run=run,
                )
            with structlog.contextvars.bound_contextvars(run=run):
                for technique in self.cfg.techniques:
                    try:
                        self._run_technique(
                            technique, split, entry.metric, results[technique], times[technique]
                        )
                    except OpfrError as exc:
                        raise ExperimentError(
                            str(exc), dataset=entry.key, run=run, technique=technique
                        ) from exc
                logger.info("Hold-out run finished", queries=len(split.queries))
        return results, times


def run_experiment(
    cfg: ExperimentConfig,
    datasets: Mapping[str, Dataset] | None = None,
    config: OpfrConfig | None = None,
) -> ExperimentReport:
    runner = ExperimentRunner(cfg, config)
    report = runner.run(datasets)
    logger.info(
        "Experiment finished",
        datasets=len(cfg.datasets),
        cells=len(report.cells),
        comparisons=len(report.comparisons),
    )
    return report
