"""Retrieval latency benchmark: time every query under each technique,
collect per-row results, and emit CSV or Markdown reports with
per-technique averages.

Runs are strictly sequential; concurrent queries would corrupt the latency
attribution.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Sequence

from .engine import SCOPE_AUTO, Technique, query
from .errors import AllQueriesFailedError, CbirError
from .imaging import load_image
from .store import IndexFile


class ReportFormat(Enum):
    CSV = "csv"
    MARKDOWN = "md"


@dataclass(frozen=True)
class BenchRow:
    """One timed query under one technique; ``error`` set means the row
    failed and is excluded from averages."""

    query_path: str
    category: str
    technique: Technique
    elapsed: float | None
    top1_image_id: int | None
    matches: int | None
    error: str | None = None


@dataclass(frozen=True)
class BenchReport:
    rows: tuple[BenchRow, ...]
    averages: dict[Technique, float]
    total_queries: int


def _matches_from_distance(distance: float) -> int:
    # match-point distance is 1 / (1 + matches); invert and round
    return int(round(1.0 / distance - 1.0))


def run_benchmark(
    idx: IndexFile,
    queries: Sequence[str | Path],
    techniques: Sequence[Technique] | None = None,
    scope: str = SCOPE_AUTO,
    warmup: int = 1,
    clock: Callable[[], float] = time.perf_counter,
) -> BenchReport:
    """Time one query per (technique, image) pair.

    Techniques run in enum order and queries in input order, each timed
    exactly once after ``warmup`` untimed passes over the first query.
    Failed rows carry an error marker and do not contribute to averages.
    """
    if not queries:
        raise ValueError("no queries supplied")
    if warmup < 0:
        raise ValueError(f"warmup must be >= 0, got {warmup}")
    chosen = [t for t in Technique if techniques is None or t in techniques]

    rows: list[BenchRow] = []
    for technique in chosen:
        for _ in range(warmup):
            try:
                query(idx, load_image(queries[0]), technique, scope=scope, clock=clock)
            except (CbirError, OSError):
                break
        for qpath in queries:
            path_str = str(qpath)
            try:
                img = load_image(qpath)
                result = query(idx, img, technique, scope=scope, clock=clock)
            except (CbirError, OSError) as exc:
                rows.append(
                    BenchRow(
                        query_path=path_str,
                        category="",
                        technique=technique,
                        elapsed=None,
                        top1_image_id=None,
                        matches=None,
                        error=type(exc).__name__,
                    )
                )
                continue
            top_id, top_dist = result.ranked[0]
            matches = (
                _matches_from_distance(top_dist)
                if technique is Technique.MATCHPOINT
                else None
            )
            rows.append(
                BenchRow(
                    query_path=path_str,
                    category=result.category_used,
                    technique=technique,
                    elapsed=result.elapsed,
                    top1_image_id=top_id,
                    matches=matches,
                )
            )

    averages: dict[Technique, float] = {}
    for technique in chosen:
        timed = [r.elapsed for r in rows if r.technique is technique and r.elapsed is not None]
        if timed:
            averages[technique] = sum(timed) / len(timed)
    if not averages:
        raise AllQueriesFailedError("every benchmark query failed")
    return BenchReport(rows=tuple(rows), averages=averages, total_queries=len(queries))


def _row_cells(row: BenchRow) -> list[str]:
    if row.error is not None:
        return [row.query_path, row.category, row.technique.value, "", f"error:{row.error}", ""]
    return [
        row.query_path,
        row.category,
        row.technique.value,
        f"{row.elapsed:.6f}",
        str(row.top1_image_id),
        "" if row.matches is None else str(row.matches),
    ]


def _printed_average(report: BenchReport, technique: Technique) -> float:
    """Mean of the row values as printed (6 decimals), so re-averaging a
    parsed report reproduces the embedded average."""
    printed = [
        float(f"{r.elapsed:.6f}")
        for r in report.rows
        if r.technique is technique and r.elapsed is not None
    ]
    return sum(printed) / len(printed)


def _render_csv(report: BenchReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["query", "category", "technique", "elapsed_sec", "top1", "matches"])
    for row in report.rows:
        writer.writerow(_row_cells(row))
    for technique in Technique:
        if technique in report.averages:
            writer.writerow(
                ["AVERAGE", "", technique.value, f"{_printed_average(report, technique):.9f}", "", ""]
            )
    return buf.getvalue()


_TECHNIQUE_TITLES = {
    Technique.HISTOGRAM: "Histogram (sec)",
    Technique.EIGEN: "Eigen values (sec)",
    Technique.MATCHPOINT: "Match point (sec)",
}


def _render_markdown(report: BenchReport) -> str:
    present = [t for t in Technique if any(r.technique is t for r in report.rows)]
    by_query: dict[str, dict[Technique, BenchRow]] = {}
    order: list[str] = []
    for row in report.rows:
        if row.query_path not in by_query:
            by_query[row.query_path] = {}
            order.append(row.query_path)
        by_query[row.query_path][row.technique] = row

    lines = []
    header = ["Query", "Category"] + [_TECHNIQUE_TITLES[t] for t in present]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "|".join([" --- "] * len(header)) + "|")
    for qpath in order:
        cells = by_query[qpath]
        category = next(
            (c.category for c in cells.values() if c.error is None and c.category), ""
        )
        rendered = [qpath, category]
        for t in present:
            row = cells.get(t)
            if row is None:
                rendered.append("")
            elif row.error is not None:
                rendered.append(f"error:{row.error}")
            else:
                rendered.append(f"{row.elapsed:.6f}")
        lines.append("| " + " | ".join(rendered) + " |")
    avg = ["AVERAGE", ""] + [
        f"{_printed_average(report, t):.6f}" if t in report.averages else "" for t in present
    ]
    lines.append("| " + " | ".join(avg) + " |")
    return "\n".join(lines) + "\n"


def emit_report(report: BenchReport, fmt: ReportFormat = ReportFormat.MARKDOWN) -> str:
    """Render a report: CSV rows plus trailing AVERAGE rows, or a Markdown
    pipe table with one column per technique. Elapsed times carry six
    decimal places."""
    if fmt is ReportFormat.CSV:
        return _render_csv(report)
    return _render_markdown(report)
