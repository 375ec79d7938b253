# Dataset parsing, persistence and hold-out splitting
from services.dataset.codec import (
    build_dataset,
    load_dataset,
    parse_dataset,
    require_complete,
    write_dataset,
)
from services.dataset.splitting import holdout_runs, split_dataset

__all__ = [
    "build_dataset",
    "load_dataset",
    "parse_dataset",
    "require_complete",
    "write_dataset",
    "holdout_runs",
    "split_dataset",
]
