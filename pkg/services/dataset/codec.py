import math
from pathlib import Path

from pydantic import ValidationError

from shared.errors import (
    DatasetError,
    DuplicateSampleId,
    EmptyDataset,
    LabelOutOfRange,
    MalformedHeader,
    MalformedRow,
    MissingClass,
    NonFiniteValue,
    RowArityMismatch,
    SampleCountMismatch,
)
from shared.files import read_utf8
from shared.schemas.dataset import Dataset, LabeledSample


def _parse_int(token: str, line: int, what: str, error: type[Exception]) -> int:
    try:
        return int(token)
    except ValueError:
        raise error(line, f"{what} is not an integer: {token!r}") from None


def _parse_header(tokens: list[str], line: int) -> tuple[int, int, int]:
    if len(tokens) != 3:
        raise MalformedHeader(
            line, "header must read '<n_samples> <n_classes> <n_features>'"
        )
    n_samples, n_classes, dim = (
        _parse_int(token, line, name, MalformedHeader)
        for token, name in zip(
            tokens, ("n_samples", "n_classes", "n_features"), strict=True
        )
    )
    if n_samples < 1 or n_classes < 1 or dim < 1:
        raise MalformedHeader(line, "header counts must be positive")
    return n_samples, n_classes, dim


def _parse_row(
    tokens: list[str], line: int, n_classes: int, dim: int
) -> LabeledSample:
    if len(tokens) != dim + 2:
        raise RowArityMismatch(
            line, f"expected {dim + 2} fields (id, label, {dim} features), got {len(tokens)}"
        )
    sample_id = _parse_int(tokens[0], line, "id", MalformedRow)
    label = _parse_int(tokens[1], line, "label", MalformedRow)
    if sample_id < 0:
        raise MalformedRow(line, f"id must be nonnegative, got {sample_id}")
    if not 0 <= label < n_classes:
        raise LabelOutOfRange(line, f"label {label} outside [0, {n_classes})")

    features: list[float] = []
    for token in tokens[2:]:
        try:
            value = float(token)
        except ValueError:
            raise NonFiniteValue(line, f"feature is not a number: {token!r}") from None
        if not math.isfinite(value):
            raise NonFiniteValue(line, f"feature is not finite: {token!r}")
        features.append(value)
    return LabeledSample(id=sample_id, label=label, features=tuple(features))


def parse_dataset(content: str, require_all_classes: bool = True) -> Dataset:
    """Parse .ds text. Query files may set ``require_all_classes=False``."""
    header: tuple[int, int, int] | None = None
    header_line = 0
    samples: list[LabeledSample] = []
    first_seen: dict[int, int] = {}
    ids_seen: set[int] = set()
    last_line = 0

    for line_no, raw in enumerate(content.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        last_line = line_no
        tokens = stripped.split()
        if header is None:
            header = _parse_header(tokens, line_no)
            header_line = line_no
            continue

        n_samples, n_classes, dim = header
        if len(samples) == n_samples:
            raise SampleCountMismatch(
                line_no, f"more rows than the {n_samples} declared samples"
            )
        sample = _parse_row(tokens, line_no, n_classes, dim)
        if sample.id in ids_seen:
            raise DuplicateSampleId(line_no, f"duplicate sample id {sample.id}")
        ids_seen.add(sample.id)
        first_seen.setdefault(sample.label, line_no)
        samples.append(sample)

    if header is None:
        raise MalformedHeader(max(last_line, 1), "missing header line")

    n_samples, n_classes, dim = header
    if len(samples) != n_samples:
        raise SampleCountMismatch(
            max(last_line, header_line),
            f"header declares {n_samples} samples, found {len(samples)}",
        )
    missing = sorted(set(range(n_classes)) - set(first_seen))
    if missing and require_all_classes:
        raise MissingClass(
            header_line, f"classes without samples: {', '.join(map(str, missing))}"
        )

    return Dataset(samples=tuple(samples), n_classes=n_classes, dim=dim)


def load_dataset(path: str | Path, require_all_classes: bool = True) -> Dataset:
    """Read and parse a .ds file; undecodable bytes are a parse error."""
    return parse_dataset(read_utf8(path, MalformedRow), require_all_classes)


def require_complete(ds: Dataset) -> Dataset:
    if not ds.samples:
        raise EmptyDataset("dataset has no samples")
    missing = sorted(set(range(ds.n_classes)) - ds.classes_present())
    if missing:
        raise EmptyDataset(
            f"classes without samples: {', '.join(map(str, missing))}"
        )
    return ds


def write_dataset(ds: Dataset, require_all_classes: bool = True) -> str:
    if require_all_classes:
        require_complete(ds)
    elif not ds.samples:
        raise EmptyDataset("dataset has no samples")
    lines = [f"{len(ds.samples)} {ds.n_classes} {ds.dim}"]
    for sample in ds.samples:
        features = " ".join(repr(float(x)) for x in sample.features)
        lines.append(f"{sample.id} {sample.label} {features}")
    return "\n".join(lines) + "\n"


def build_dataset(
    rows: list[tuple[int, int, list[float]]], n_classes: int | None = None
) -> Dataset:
    """Build a Dataset from ``(id, label, features)`` tuples."""
    if not rows:
        raise EmptyDataset("dataset has no samples")
    try:
        samples = tuple(
            LabeledSample(id=i, label=label, features=tuple(features))
            for i, label, features in rows
        )
        return Dataset(
            samples=samples,
            n_classes=n_classes if n_classes is not None else 1 + max(s.label for s in samples),
            dim=len(rows[0][2]),
        )
    except ValidationError as e:
        raise DatasetError(f"invalid dataset: {e.errors()[0]['msg']}") from e
