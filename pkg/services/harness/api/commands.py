import argparse
import sys
from pathlib import Path

import structlog

from services.dataset import load_dataset, split_dataset, write_dataset
from services.evaluation import mean_average_precision, score_ranking
from services.harness.services.benchmark_service import benchmark, format_benchmark
from services.harness.services.experiment_service import run_experiment
from services.harness.services.model_store import load_model, save_model
from services.harness.services.report_service import emit_report
from services.opf import select_k, train_cg, train_knn
from services.ranking import (
    DistanceRanker,
    OpfRanker,
    load_rankings,
    rank_all,
    write_rankings,
)
from shared.config import OpfrConfig
from shared.errors import EvaluationError, ExperimentError, InvalidParameter
from shared.files import read_utf8
from shared.metrics import render_metrics
from shared.schemas.experiment import ExperimentConfig

logger = structlog.get_logger(__name__)


def _write(path: str | None, content: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(content)
    else:
        Path(path).write_text(content, encoding="utf-8")


def parse_cutoffs(value: str) -> list[int]:
    try:
        cutoffs = sorted({int(item) for item in value.split(",") if item.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {value!r}") from None
    if not cutoffs or cutoffs[0] < 1:
        raise argparse.ArgumentTypeError("cut-offs must be positive integers")
    return cutoffs


def train(args: argparse.Namespace, config: OpfrConfig) -> int:
    ds = load_dataset(args.input)
    budget = config.distance_matrix_budget_bytes
    if args.variant == "cg":
        forest = train_cg(ds, args.metric, budget)
    else:
        k = args.k
        if k is None:
            k_max = args.kmax if args.kmax is not None else config.k_max
            k = select_k(ds, k_max, args.metric, budget)
        forest = train_knn(ds, k, args.metric, budget)
    save_model(forest, args.model)
    print(
        f"{args.variant} forest: n={forest.n} prototypes={len(forest.prototypes)}"
        + (f" k={forest.k}" if forest.k is not None else "")
        + f" -> {args.model}"
    )
    return 0


def rank(args: argparse.Namespace, config: OpfrConfig) -> int:
    forest = load_model(args.model)
    queries = load_dataset(args.queries, require_all_classes=False)
    rankings = rank_all(OpfRanker(forest), queries, args.top)
    _write(args.output, write_rankings(rankings, forest.samples.label_of()))
    logger.info("Rankings written", queries=len(rankings), r=args.top)
    return 0


def evaluate(args: argparse.Namespace, config: OpfrConfig) -> int:
    rankings = load_rankings(args.rankings)
    queries = load_dataset(args.queries, require_all_classes=False)
    labels = load_dataset(args.train).label_of()
    query_labels = queries.label_of()
    for ranking in rankings:
        if ranking.query_id not in query_labels:
            raise EvaluationError(f"ranked query {ranking.query_id} is not in {args.queries}")
    if not rankings:
        raise EvaluationError(f"{args.rankings} holds no rankings")

    cutoffs: list[int | None] = list(args.top) if args.top else [None]
    for r in cutoffs:
        scores = [
            score_ranking(
                ranking if r is None else ranking.prefix(r),
                query_labels[ranking.query_id],
                labels,
                r,
            )
            for ranking in rankings
        ]
        name = "all" if r is None else f"top-{r}"
        ndcg = sum(s.ndcg for s in scores) / len(scores)
        map_ = mean_average_precision([s.average_precision for s in scores])
        precision = sum(s.precision for s in scores) / len(scores)
        print(f"{name}: queries={len(scores)} NDCG={ndcg:.6f} MAP={map_:.6f} P@r={precision:.6f}")
    return 0


def experiment(args: argparse.Namespace, config: OpfrConfig) -> int:
    def undecodable(line: int, reason: str) -> ExperimentError:
        return ExperimentError(f"{args.config}: line {line}: {reason}")

    cfg = ExperimentConfig.model_validate_json(read_utf8(args.config, undecodable))
    defaults = {
        "top_r": config.default_top_r,
        "n_runs": config.default_n_runs,
        "k_max": config.k_max,
        "alpha": config.alpha,
    }
    overrides: dict[str, object] = {
        key: value for key, value in defaults.items() if key not in cfg.model_fields_set
    }
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.runs is not None:
        overrides["n_runs"] = args.runs
    if args.timing:
        overrides["timing"] = True
    if overrides:
        cfg = ExperimentConfig.model_validate(cfg.model_dump() | overrides)

    # relative dataset paths resolve against the config file
    base = Path(args.config).parent
    for entry in cfg.datasets:
        if entry.path is not None and not Path(entry.path).is_absolute():
            entry.path = str(base / entry.path)

    report = run_experiment(cfg, config=config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = emit_report(report, "table")
    (out / "report.txt").write_text(table, encoding="utf-8")
    (out / "report.csv").write_text(emit_report(report, "csv"), encoding="utf-8")
    (out / "report.json").write_text(emit_report(report, "json"), encoding="utf-8")
    sys.stdout.write(table)
    return 0


def run_benchmark(args: argparse.Namespace, config: OpfrConfig) -> int:
    forest = load_model(args.model)
    queries = load_dataset(args.queries, require_all_classes=False)
    repetitions = args.reps if args.reps is not None else config.benchmark_repetitions
    warmup = config.benchmark_warmup and not args.no_warmup
    results = [
        benchmark(ranker, queries, args.top, repetitions, warmup)
        for ranker in (OpfRanker(forest), DistanceRanker(forest.samples, forest.metric))
    ]
    sys.stdout.write(format_benchmark(results))
    if args.metrics_out:
        Path(args.metrics_out).write_text(render_metrics(), encoding="utf-8")
    return 0


def split(args: argparse.Namespace, config: OpfrConfig) -> int:
    ds = load_dataset(args.input)
    pair = split_dataset(ds, args.fraction, args.seed, args.stratified)
    if len(pair.queries) == 0:
        raise InvalidParameter(f"fraction {args.fraction} leaves no query samples")
    source = Path(args.input)
    train_out = args.train_out or str(source.with_suffix(".train.ds"))
    queries_out = args.queries_out or str(source.with_suffix(".queries.ds"))
    _write(train_out, write_dataset(pair.train))
    _write(queries_out, write_dataset(pair.queries, require_all_classes=False))
    print(f"train={len(pair.train)} -> {train_out}  queries={len(pair.queries)} -> {queries_out}")
    return 0
