import csv
import io

import numpy as np
import pytest

from conftest import encode_png
from cbir.bench import (
    BenchReport,
    BenchRow,
    ReportFormat,
    emit_report,
    run_benchmark,
)
from cbir.engine import SCOPE_ALL, Technique
from cbir.errors import AllQueriesFailedError
from cbir.store import IndexConfig, build_index

FAST_CONFIG = IndexConfig(eigen_side=8, eigen_k=8)


class FakeClock:
    """Returns scripted instants, then keeps stepping by the last delta."""

    def __init__(self, step=0.125):
        self.now = 0.0
        self.step = step

    def __call__(self) -> float:
        value = self.now
        self.now += self.step
        return value


@pytest.fixture(scope="module")
def setup(tmp_path_factory):
    rng = np.random.default_rng(31)
    root = tmp_path_factory.mktemp("bench_corpus")
    for category in ("one", "two"):
        directory = root / category
        directory.mkdir()
        for i in range(2):
            arr = rng.integers(0, 256, size=(32, 32, 3), dtype=np.uint8)
            (directory / f"{category}_{i}.png").write_bytes(encode_png(arr))
    idx = build_index(root, config=FAST_CONFIG)
    queries = sorted(str(p) for p in root.rglob("*.png"))
    return idx, queries


class TestRunBenchmark:
    def test_singleton_mean(self, setup):
        idx, queries = setup
        report = run_benchmark(idx, queries[:1], techniques=[Technique.HISTOGRAM], scope=SCOPE_ALL)
        assert len(report.rows) == 1
        assert report.averages[Technique.HISTOGRAM] == report.rows[0].elapsed

    def test_fake_clock_arithmetic_oracle(self, setup):
        idx, queries = setup
        # each query consumes two ticks: elapsed is always one step
        clock = FakeClock(step=0.125)
        report = run_benchmark(
            idx,
            queries[:3],
            techniques=[Technique.HISTOGRAM, Technique.EIGEN],
            scope=SCOPE_ALL,
            warmup=0,
            clock=clock,
        )
        assert all(row.elapsed == 0.125 for row in report.rows)
        assert report.averages[Technique.HISTOGRAM] == pytest.approx(0.125, abs=1e-12)
        assert report.averages[Technique.EIGEN] == pytest.approx(0.125, abs=1e-12)

    def test_fake_clock_byte_stable(self, setup):
        idx, queries = setup
        texts = []
        for _ in range(2):
            report = run_benchmark(
                idx, queries, scope=SCOPE_ALL, warmup=0, clock=FakeClock()
            )
            texts.append(emit_report(report, ReportFormat.CSV))
        assert texts[0] == texts[1]

    def test_each_query_once_per_technique(self, setup):
        idx, queries = setup
        report = run_benchmark(idx, queries, scope=SCOPE_ALL, warmup=0)
        for technique in Technique:
            paths = [r.query_path for r in report.rows if r.technique is technique]
            assert paths == list(queries)
        assert report.total_queries == len(queries)

    def test_failed_rows_marked_and_excluded(self, setup, tmp_path):
        idx, queries = setup
        bogus = str(tmp_path / "missing.png")
        report = run_benchmark(
            idx, [queries[0], bogus], techniques=[Technique.HISTOGRAM], scope=SCOPE_ALL, warmup=0
        )
        good, bad = report.rows
        assert bad.error is not None and bad.elapsed is None
        assert report.averages[Technique.HISTOGRAM] == good.elapsed

    def test_all_queries_failed(self, setup, tmp_path):
        idx, _queries = setup
        with pytest.raises(AllQueriesFailedError):
            run_benchmark(idx, [str(tmp_path / "nope.png")], scope=SCOPE_ALL, warmup=0)

    def test_empty_queries_rejected(self, setup):
        idx, _queries = setup
        with pytest.raises(ValueError):
            run_benchmark(idx, [])

    def test_matches_column_only_for_matchpoint(self, setup):
        idx, queries = setup
        report = run_benchmark(idx, queries[:1], scope=SCOPE_ALL, warmup=0)
        by_tech = {r.technique: r for r in report.rows}
        assert by_tech[Technique.HISTOGRAM].matches is None
        assert by_tech[Technique.EIGEN].matches is None
        assert by_tech[Technique.MATCHPOINT].matches is not None
        # self query: every descriptor matches
        rec = next(r for r in idx.records if r.path in queries[0].replace("\\", "/"))
        assert by_tech[Technique.MATCHPOINT].matches == rec.features.count


class TestEmitReport:
    def test_csv_layout_and_parse_back(self, setup):
        idx, queries = setup
        report = run_benchmark(idx, queries[:2], scope=SCOPE_ALL, warmup=0)
        text = emit_report(report, ReportFormat.CSV)
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["query", "category", "technique", "elapsed_sec", "top1", "matches"]
        data = [r for r in rows[1:] if r[0] != "AVERAGE"]
        averages = [r for r in rows[1:] if r[0] == "AVERAGE"]
        assert len(data) == 2 * 3
        assert len(averages) == 3
        for avg_row in averages:
            technique = Technique(avg_row[2])
            elapsed = [float(r[3]) for r in data if r[2] == technique.value]
            recomputed = sum(elapsed) / len(elapsed)
            assert abs(float(avg_row[3]) - recomputed) <= 1e-9

    def test_six_decimal_formatting(self):
        row = BenchRow(
            query_path="q.png",
            category="face",
            technique=Technique.EIGEN,
            elapsed=2.3876,
            top1_image_id=4,
            matches=None,
        )
        report = BenchReport(rows=(row,), averages={Technique.EIGEN: 2.3876}, total_queries=1)
        text = emit_report(report, ReportFormat.CSV)
        assert "2.387600" in text

    def test_error_rows_render_with_marker(self):
        row = BenchRow(
            query_path="q.png",
            category="",
            technique=Technique.HISTOGRAM,
            elapsed=None,
            top1_image_id=None,
            matches=None,
            error="CorruptStreamError",
        )
        ok = BenchRow(
            query_path="r.png",
            category="x",
            technique=Technique.HISTOGRAM,
            elapsed=0.5,
            top1_image_id=1,
            matches=None,
        )
        report = BenchReport(rows=(row, ok), averages={Technique.HISTOGRAM: 0.5}, total_queries=2)
        text = emit_report(report, ReportFormat.CSV)
        assert "error:CorruptStreamError" in text

    def test_markdown_table_shape(self, setup):
        idx, queries = setup
        report = run_benchmark(idx, queries[:2], scope=SCOPE_ALL, warmup=0)
        text = emit_report(report, ReportFormat.MARKDOWN)
        lines = text.strip().splitlines()
        assert lines[0].startswith("| Query | Category |")
        assert "Histogram (sec)" in lines[0]
        assert "Eigen values (sec)" in lines[0]
        assert "Match point (sec)" in lines[0]
        # header + separator + 2 queries + average
        assert len(lines) == 5
        assert lines[-1].startswith("| AVERAGE |")

    def test_average_recomputation_invariant(self, setup):
        idx, queries = setup
        report = run_benchmark(idx, queries, scope=SCOPE_ALL, warmup=1)
        for technique, average in report.averages.items():
            elapsed = [r.elapsed for r in report.rows if r.technique is technique and r.elapsed is not None]
            assert abs(average - sum(elapsed) / len(elapsed)) <= 1e-12
