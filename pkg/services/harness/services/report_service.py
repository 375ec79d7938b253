import csv
import io
from typing import Literal

from shared.schemas.experiment import CellResult, ExperimentReport

ReportFormat = Literal["table", "csv", "json"]

CSV_HEADER = ("dataset", "fraction", "technique", "top_r", "metric", "mean", "best")
METRIC_LABELS = {"ndcg": "NDCG", "map": "MAP"}


def _csv(report: ExperimentReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for cell in report.cells:
        for metric in METRIC_LABELS:
            writer.writerow(
                (
                    cell.dataset,
                    repr(cell.fraction),
                    cell.technique,
                    cell.top_r,
                    metric,
                    repr(getattr(cell, f"mean_{metric}")),
                    int(getattr(cell, f"best_{metric}")),
                )
            )
    return buffer.getvalue()


def _groups(report: ExperimentReport) -> list[tuple[str, float]]:
    return list(dict.fromkeys((c.dataset, c.fraction) for c in report.cells))


def _quality_table(cells: list[CellResult], top_r: list[int]) -> list[str]:
    width = max(len("technique"), *(len(c.technique) for c in cells))
    header = "technique".ljust(width) + "".join(
        f"  {METRIC_LABELS[m] + '@' + str(r):>10}" for r in top_r for m in METRIC_LABELS
    )
    lines = [header, "-" * len(header)]
    techniques = list(dict.fromkeys(c.technique for c in cells))
    for technique in techniques:
        row = technique.ljust(width)
        for r in top_r:
            cell = next(c for c in cells if c.technique == technique and c.top_r == r)
            for metric in METRIC_LABELS:
                mark = "*" if getattr(cell, f"best_{metric}") else " "
                row += f"  {getattr(cell, f'mean_{metric}'):>9.4f}{mark}"
        lines.append(row)
    return lines


def _table(report: ExperimentReport) -> str:
    top_r = report.config.top_r
    lines = [
        f"OPF information ranking, {report.config.n_runs} runs, seed {report.seed}",
        "* best mean, or not significantly different from it "
        f"(Wilcoxon signed-rank, alpha={report.config.alpha})",
    ]
    for dataset, fraction in _groups(report):
        cells = [c for c in report.cells if c.dataset == dataset and c.fraction == fraction]
        lines += ["", f"{dataset}  train fraction {fraction:.2f}"]
        lines += _quality_table(cells, top_r)

        pairs = [
            c for c in report.comparisons if c.dataset == dataset and c.fraction == fraction
        ]
        if pairs:
            lines.append("")
            for c in pairs:
                label = f"{c.technique_a} vs {c.technique_b} {METRIC_LABELS[c.metric]}@{c.top_r}"
                if not c.applicable:
                    lines.append(f"  {label}: identical runs, not applicable")
                else:
                    verdict = "significant" if c.significant else "not significant"
                    lines.append(
                        f"  {label}: W={c.statistic:.1f} p={c.p_value:.4f} {verdict}"
                    )

    if report.timings:
        lines += ["", "Computational load (mean seconds per run, ranking only)"]
        width = max(len("technique"), *(len(t.technique) for t in report.timings))
        header = (
            "technique".ljust(width)
            + "  fraction"
            + "".join(f"  {'top-' + str(r):>10}" for r in top_r)
            + f"  {'training':>10}"
        )
        lines += [header, "-" * len(header)]
        for t in report.timings:
            # one ranking pass at max(top_r) serves every cut-off
            lines.append(
                f"{t.technique.ljust(width)}  {t.fraction:>8.2f}"
                + "".join(f"  {t.mean_ranking_seconds:>10.6f}" for _ in top_r)
                + f"  {t.mean_training_seconds:>10.6f}"
                + f"  [{t.dataset}]"
            )
    return "\n".join(lines) + "\n"


def emit_report(report: ExperimentReport, fmt: ReportFormat = "table") -> str:
    if fmt == "csv":
        return _csv(report)
    if fmt == "json":
        return report.model_dump_json(indent=2) + "\n"
    return _table(report)
