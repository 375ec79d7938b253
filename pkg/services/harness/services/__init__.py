# Harness services
from services.harness.services.benchmark_service import benchmark, format_benchmark
from services.harness.services.experiment_service import ExperimentRunner, run_experiment
from services.harness.services.model_store import (
    load_model,
    parse_model,
    save_model,
    serialize_model,
)
from services.harness.services.report_service import emit_report

__all__ = [
    "benchmark",
    "format_benchmark",
    "ExperimentRunner",
    "run_experiment",
    "load_model",
    "parse_model",
    "save_model",
    "serialize_model",
    "emit_report",
]
