import argparse
import sys
from pathlib import Path

import numpy as np

from services.dataset import build_dataset, write_dataset
from shared.schemas.dataset import Dataset


def make_blobs(
    n_per_class: int = 50,
    n_classes: int = 4,
    dim: int = 2,
    spread: float = 1.0,
    separation: float = 20.0,
    seed: int = 0,
) -> Dataset:
    """Isotropic Gaussian blobs with centers on a grid ``separation`` apart."""
    rng = np.random.default_rng(seed)
    side = int(np.ceil(n_classes ** (1.0 / dim)))
    grid = np.stack(
        np.unravel_index(np.arange(n_classes), (side,) * dim), axis=1
    ).astype(np.float64)
    centers = grid * separation

    rows = []
    for label, center in enumerate(centers):
        points = center + rng.normal(0.0, spread, size=(n_per_class, dim))
        for point in points:
            rows.append((len(rows), label, point.tolist()))
    return build_dataset(rows, n_classes=n_classes)


def main() -> int:
    parser = argparse.ArgumentParser(description="Write a Gaussian blob .ds fixture")
    parser.add_argument("--output", default="-", help="target path (default: stdout)")
    parser.add_argument("--per-class", type=int, default=50)
    parser.add_argument("--classes", type=int, default=4)
    parser.add_argument("--dim", type=int, default=2)
    parser.add_argument("--spread", type=float, default=1.0)
    parser.add_argument("--separation", type=float, default=20.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    content = write_dataset(
        make_blobs(
            args.per_class,
            args.classes,
            args.dim,
            args.spread,
            args.separation,
            args.seed,
        )
    )
    if args.output == "-":
        sys.stdout.write(content)
    else:
        Path(args.output).write_text(content, encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
