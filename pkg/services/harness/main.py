import argparse
import sys
from collections.abc import Sequence

from pydantic import ValidationError

from services.harness.api import commands
from services.metricspace import available_metrics
from shared.config import OpfrConfig, get_config
from shared.errors import OpfrError
from shared.logging import setup_logging


def create_parser(config: OpfrConfig) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opfr",
        description="Information ranking with optimum-path forest classifiers",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    metrics = available_metrics()

    p = sub.add_parser("train", help="Train a CG-OPF or k-NN-OPF model")
    p.add_argument("--input", required=True, help="training .ds file")
    p.add_argument("--variant", choices=["cg", "knn"], required=True)
    p.add_argument("--metric", choices=metrics, default=config.default_metric)
    k_group = p.add_mutually_exclusive_group()
    k_group.add_argument("--k", type=int, help="fixed k for k-NN-OPF")
    k_group.add_argument("--kmax", type=int, help="select k in 1..kmax by training accuracy")
    p.add_argument("--model", required=True, help="output model path")
    p.set_defaults(handler=commands.train)

    p = sub.add_parser("rank", help="Write top-r rankings for every query")
    p.add_argument("--model", required=True)
    p.add_argument("--queries", required=True, help="query .ds file")
    p.add_argument("--top", type=int, required=True, help="ranking length r")
    p.add_argument("--output", default=None, help="rankings CSV (default: stdout)")
    p.set_defaults(handler=commands.rank)

    p = sub.add_parser("evaluate", help="Score stored rankings with NDCG, MAP and P@r")
    p.add_argument("--rankings", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--train", required=True, help="training .ds file holding candidate labels")
    p.add_argument(
        "--top",
        type=commands.parse_cutoffs,
        default=None,
        help="comma-separated cut-offs, e.g. 10,15,20 (default: full lists)",
    )
    p.set_defaults(handler=commands.evaluate)

    p = sub.add_parser("experiment", help="Run the hold-out ranking protocol")
    p.add_argument("--config", required=True, help="experiment JSON file")
    p.add_argument("--seed", type=int, default=None, help="override base_seed")
    p.add_argument("--runs", type=int, default=None, help="override n_runs")
    p.add_argument("--timing", action="store_true", help="report ranking and training times")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(handler=commands.experiment)

    p = sub.add_parser("benchmark", help="Time ranking against the distance baseline")
    p.add_argument("--model", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--top", type=int, required=True)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--no-warmup", action="store_true")
    p.add_argument("--metrics-out", default=None, help="write Prometheus text exposition")
    p.set_defaults(handler=commands.run_benchmark)

    p = sub.add_parser("split", help="Split a dataset into training and query files")
    p.add_argument("--input", required=True)
    p.add_argument("--fraction", type=float, default=config.default_train_fraction)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--stratified", action="store_true")
    p.add_argument("--train-out", default=None)
    p.add_argument("--queries-out", default=None)
    p.set_defaults(handler=commands.split)

    return parser


def _one_line(exc: Exception) -> str:
    if isinstance(exc, ValidationError):
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        return f"invalid {where}: {first['msg']}" if where else first["msg"]
    return " ".join(str(exc).split()) or type(exc).__name__


def main(argv: Sequence[str] | None = None) -> int:
    config = get_config()
    setup_logging(config)
    args = create_parser(config).parse_args(argv)
    try:
        code: int = args.handler(args, config)
    except (OpfrError, OSError, ValidationError) as exc:
        print(f"opfr: error: {_one_line(exc)}", file=sys.stderr)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())
