import math
from pathlib import Path

import structlog
from pydantic import ValidationError

from services.metricspace import resolve_metric
from shared.errors import ModelCorruptionError, ModelVersionError, UnknownMetric
from shared.files import read_utf8
from shared.schemas.base import Variant
from shared.schemas.dataset import Dataset, LabeledSample
from shared.schemas.forest import DensityField, PrototypeSet, TrainedForest

logger = structlog.get_logger(__name__)

MAGIC = "opfr"
FORMAT_VERSION = "v1"


def serialize_model(forest: TrainedForest) -> str:
    """Render a forest as versioned text, one node per line in settlement order."""
    variant = Variant(forest.variant)
    header = [MAGIC, FORMAT_VERSION, variant.value, forest.metric, str(forest.n)]
    header.append(str(forest.samples.dim))
    if variant == Variant.KNN:
        assert forest.k is not None and forest.density is not None
        header += [str(forest.k), repr(forest.density.sigma), repr(forest.density.d_max)]

    lines = [" ".join(header)]
    for sample_id in forest.order:
        i = forest.index_of[sample_id]
        sample = forest.samples.samples[i]
        fields = [str(sample_id), str(sample.label), repr(forest.cost[i])]
        if forest.density is not None:
            fields.append(repr(forest.density.rho[i]))
        pred = forest.pred[i]
        fields += [
            "-" if pred is None else str(pred),
            str(forest.root[i]),
            "1" if sample_id in forest.prototypes else "0",
        ]
        fields += [repr(float(x)) for x in sample.features]
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def _int(token: str, line: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ModelCorruptionError(line, f"{what} is not an integer: {token!r}") from None


def _float(token: str, line: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ModelCorruptionError(line, f"{what} is not a number: {token!r}") from None
    if math.isnan(value):
        raise ModelCorruptionError(line, f"{what} is NaN")
    return value


def _parse_header(tokens: list[str]) -> tuple[Variant, str, int, int, list[str]]:
    if len(tokens) < 2 or tokens[0] != MAGIC:
        raise ModelCorruptionError(1, f"not an {MAGIC} model file")
    if tokens[1] != FORMAT_VERSION:
        raise ModelVersionError(
            1, f"unsupported model version {tokens[1]!r}, expected {FORMAT_VERSION}"
        )
    if len(tokens) < 6:
        raise ModelCorruptionError(1, "header is incomplete")
    try:
        variant = Variant(tokens[2])
        metric = resolve_metric(tokens[3])
    except (ValueError, UnknownMetric) as exc:
        raise ModelCorruptionError(1, str(exc)) from exc
    expected = 9 if variant == Variant.KNN else 6
    if len(tokens) != expected:
        raise ModelCorruptionError(
            1, f"{variant.value} header needs {expected} fields, got {len(tokens)}"
        )
    n = _int(tokens[4], 1, "n")
    dim = _int(tokens[5], 1, "dimension")
    if n < 2 or dim < 1:
        raise ModelCorruptionError(1, "header counts out of range")
    return variant, metric, n, dim, tokens[6:]


def parse_model(content: str) -> TrainedForest:
    lines = content.splitlines()
    if not lines:
        raise ModelCorruptionError(1, "empty model file")
    variant, metric, n, dim, extra = _parse_header(lines[0].split())
    knn = variant == Variant.KNN
    node_fields = (7 if knn else 6) + dim

    body = [(no, raw) for no, raw in enumerate(lines[1:], start=2) if raw.strip()]
    if len(body) != n:
        raise ModelCorruptionError(
            body[-1][0] if body else 1,
            f"header declares {n} nodes, found {len(body)}",
        )

    order: list[int] = []
    samples: list[LabeledSample] = []
    node: dict[int, tuple[float, float | None, int | None, int, bool]] = {}
    for line_no, raw in body:
        tokens = raw.split()
        if len(tokens) != node_fields:
            raise ModelCorruptionError(
                line_no, f"expected {node_fields} fields, got {len(tokens)}"
            )
        sample_id = _int(tokens[0], line_no, "id")
        label = _int(tokens[1], line_no, "label")
        cost = _float(tokens[2], line_no, "cost")
        rest = tokens[3:]
        rho = None
        if knn:
            rho = _float(rest[0], line_no, "rho")
            rest = rest[1:]
        pred = None if rest[0] == "-" else _int(rest[0], line_no, "pred")
        root = _int(rest[1], line_no, "root")
        if rest[2] not in ("0", "1"):
            raise ModelCorruptionError(line_no, f"prototype flag must be 0 or 1: {rest[2]!r}")
        features = tuple(_float(t, line_no, "feature") for t in rest[3:])
        if sample_id in node:
            raise ModelCorruptionError(line_no, f"duplicate node id {sample_id}")
        try:
            samples.append(LabeledSample(id=sample_id, label=label, features=features))
        except ValidationError as exc:
            raise ModelCorruptionError(line_no, exc.errors()[0]["msg"]) from exc
        node[sample_id] = (cost, rho, pred, root, rest[2] == "1")
        order.append(sample_id)

    line_of = {sample_id: no for (no, _), sample_id in zip(body, order, strict=True)}
    for sample_id, (_, _, pred, root, _) in node.items():
        for ref in (pred, root):
            if ref is not None and ref not in node:
                raise ModelCorruptionError(
                    line_of[sample_id], f"reference to unknown node {ref}"
                )

    try:
        dataset = Dataset(
            samples=tuple(samples),
            n_classes=1 + max(s.label for s in samples),
            dim=dim,
        )
        ids = [s.id for s in dataset.samples]
        density = None
        k = None
        if knn:
            k = _int(extra[0], 1, "k")
            density = DensityField(
                rho=tuple(node[i][1] or 0.0 for i in ids),
                sigma=_float(extra[1], 1, "sigma"),
                d_max=_float(extra[2], 1, "d_max"),
                k=k,
            )
        return TrainedForest(
            variant=variant,
            metric=metric,
            samples=dataset,
            cost=tuple(node[i][0] for i in ids),
            pred=tuple(node[i][2] for i in ids),
            root=tuple(node[i][3] for i in ids),
            prototypes=PrototypeSet(ids=frozenset(i for i in ids if node[i][4])),
            order=tuple(order),
            k=k,
            density=density,
        )
    except ValidationError as exc:
        raise ModelCorruptionError(1, exc.errors()[0]["msg"]) from exc


def save_model(forest: TrainedForest, path: str | Path) -> None:
    Path(path).write_text(serialize_model(forest), encoding="utf-8")
    logger.info("Model saved", path=str(path), variant=forest.variant, n=forest.n)


def load_model(path: str | Path) -> TrainedForest:
    forest = parse_model(read_utf8(path, ModelCorruptionError))
    logger.info("Model loaded", path=str(path), variant=forest.variant, n=forest.n)
    return forest
