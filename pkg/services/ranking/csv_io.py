import csv
import io
from collections.abc import Iterable, Iterator, Mapping
from pathlib import Path

from pydantic import ValidationError

from shared.errors import RankingFormatError, UnknownCandidate
from shared.files import read_utf8
from shared.schemas.base import Polarity
from shared.schemas.ranking import RankingEntry, RankingList

RANKING_HEADER = ("query_id", "rank", "candidate_id", "score", "candidate_label")


def write_rankings(rankings: Iterable[RankingList], labels: Mapping[int, int]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(RANKING_HEADER)
    for ranking in rankings:
        for entry in ranking.entries:
            if entry.candidate_id not in labels:
                raise UnknownCandidate(
                    f"candidate {entry.candidate_id} is not a training sample"
                )
            writer.writerow(
                (
                    ranking.query_id,
                    entry.rank,
                    entry.candidate_id,
                    repr(entry.score),
                    labels[entry.candidate_id],
                )
            )
    return buffer.getvalue()


def _polarity(scores: list[float]) -> Polarity:
    if all(a <= b for a, b in zip(scores, scores[1:], strict=False)):
        return Polarity.LOWER_IS_BETTER
    return Polarity.HIGHER_IS_BETTER


def _rows(content: str) -> Iterator[tuple[int, list[str]]]:
    reader = csv.reader(io.StringIO(content))
    try:
        for row in reader:
            yield reader.line_num, row
    except csv.Error as exc:
        raise RankingFormatError(reader.line_num, str(exc)) from exc


def read_rankings(content: str) -> list[RankingList]:
    """Parse a rankings CSV back into lists, one per query in file order.

    The file does not carry the polarity; it is recovered from the score
    direction, and constant scores read as lower-is-better.
    """
    rows_in = _rows(content)
    header = next(rows_in, None)
    if header is None or tuple(h.strip() for h in header[1]) != RANKING_HEADER:
        raise RankingFormatError(1, f"expected header {','.join(RANKING_HEADER)}")

    grouped: dict[int, list[tuple[int, int, float]]] = {}
    first_line: dict[int, int] = {}
    for line, row in rows_in:
        if not row:
            continue
        if len(row) != len(RANKING_HEADER):
            raise RankingFormatError(line, f"expected 5 fields, got {len(row)}")
        try:
            query_id, rank, candidate_id = int(row[0]), int(row[1]), int(row[2])
            score = float(row[3])
            int(row[4])
        except ValueError as exc:
            raise RankingFormatError(line, str(exc)) from exc
        first_line.setdefault(query_id, line)
        grouped.setdefault(query_id, []).append((rank, candidate_id, score))

    rankings = []
    for query_id, rows in grouped.items():
        rows.sort()
        scores = [score for _, _, score in rows]
        try:
            rankings.append(
                RankingList(
                    query_id=query_id,
                    entries=tuple(
                        RankingEntry(candidate_id=c, score=s, rank=r) for r, c, s in rows
                    ),
                    polarity=_polarity(scores),
                )
            )
        except ValidationError as exc:
            raise RankingFormatError(
                first_line[query_id], f"query {query_id}: {exc.errors()[0]['msg']}"
            ) from exc
    return rankings


def load_rankings(path: str | Path) -> list[RankingList]:
    return read_rankings(read_utf8(path, RankingFormatError))
