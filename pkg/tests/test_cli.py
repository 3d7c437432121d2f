import csv
import io

import numpy as np
import pytest

from conftest import encode_png
from cbir.cli import main
from cbir.store import load_index


def run_cli(argv, capsys):
    """Invoke main in-process, capturing exit code, stdout, and stderr."""
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    rng = np.random.default_rng(41)
    root = tmp_path_factory.mktemp("cli_corpus")
    for category in ("ember", "stone"):
        directory = root / category
        directory.mkdir()
        for i in range(2):
            arr = rng.integers(0, 256, size=(48, 48, 3), dtype=np.uint8)
            (directory / f"{category}_{i}.png").write_bytes(encode_png(arr))
    return root


@pytest.fixture(scope="module")
def index_path(corpus, tmp_path_factory):
    out = tmp_path_factory.mktemp("cli_idx") / "corpus.cbir"
    code = main(["index", str(corpus), "--out", str(out), "--eigen-side", "8", "--eigen-k", "8"])
    assert code == 0
    return out


class TestIndexCommand:
    def test_builds_index_quietly(self, corpus, tmp_path, capsys):
        out = tmp_path / "i.cbir"
        code, stdout, stderr = run_cli(
            ["index", str(corpus), "--out", str(out), "--eigen-side", "8", "--eigen-k", "8"],
            capsys,
        )
        assert code == 0
        assert stdout == ""  # stdout carries only results
        assert "indexed 4 images" in stderr
        idx = load_index(out)
        assert len(idx.records) == 4
        assert idx.config.eigen_side == 8

    def test_threads_env_respected(self, corpus, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("CBIR_THREADS", "2")
        out = tmp_path / "threads.cbir"
        code, _stdout, _stderr = run_cli(
            ["index", str(corpus), "--out", str(out), "--eigen-side", "8", "--eigen-k", "8"],
            capsys,
        )
        assert code == 0
        assert load_index(out).records

    def test_missing_corpus_is_data_error(self, tmp_path, capsys):
        code, _stdout, stderr = run_cli(
            ["index", str(tmp_path / "ghost"), "--out", str(tmp_path / "x.cbir")], capsys
        )
        assert code == 2
        assert "Error" in stderr


class TestQueryCommand:
    def test_self_retrieval_line(self, corpus, index_path, capsys):
        idx = load_index(index_path)
        record = idx.records[0]
        code, stdout, stderr = run_cli(
            [
                "query",
                str(corpus / record.path),
                "--index",
                str(index_path),
                "--technique",
                "hist",
                "--category",
                record.category,
            ],
            capsys,
        )
        assert code == 0
        lines = stdout.strip().splitlines()
        assert lines[0] == "rank,image_id,distance,path"
        first = lines[1].split(",")
        assert first[0] == "1"
        assert int(first[1]) == record.image_id
        assert first[2] == "0.000000"
        assert first[3] == record.path
        assert "category=" in stderr and "elapsed=" in stderr

    def test_stdout_is_pure_csv(self, corpus, index_path, capsys):
        idx = load_index(index_path)
        record = idx.records[1]
        code, stdout, _stderr = run_cli(
            [
                "query",
                str(corpus / record.path),
                "--index",
                str(index_path),
                "--technique",
                "eigen",
                "--category",
                "all",
            ],
            capsys,
        )
        assert code == 0
        rows = list(csv.reader(io.StringIO(stdout)))
        assert rows[0] == ["rank", "image_id", "distance", "path"]
        assert all(len(r) == 4 for r in rows[1:])

    def test_unknown_category_is_data_error(self, corpus, index_path, capsys):
        idx = load_index(index_path)
        code, _stdout, stderr = run_cli(
            [
                "query",
                str(corpus / idx.records[0].path),
                "--index",
                str(index_path),
                "--technique",
                "match",
                "--category",
                "nosuch",
            ],
            capsys,
        )
        assert code == 2
        assert "UnknownCategoryError" in stderr

    def test_unreadable_image_is_data_error(self, index_path, tmp_path, capsys):
        code, _stdout, stderr = run_cli(
            ["query", str(tmp_path / "none.png"), "--index", str(index_path), "--technique", "hist"],
            capsys,
        )
        assert code == 2
        assert "Error" in stderr


class TestClassifyCommand:
    def test_prints_category_and_margin(self, corpus, index_path, capsys):
        idx = load_index(index_path)
        code, stdout, _stderr = run_cli(
            ["classify", str(corpus / idx.records[0].path), "--index", str(index_path)], capsys
        )
        assert code == 0
        lines = stdout.strip().splitlines()
        assert lines[0] == "category,margin"
        category, margin = lines[1].split(",")
        assert category in idx.categories
        assert float(margin) >= 0.0


class TestBenchCommand:
    def test_csv_to_stdout(self, corpus, index_path, capsys):
        code, stdout, _stderr = run_cli(
            [
                "bench",
                "--index",
                str(index_path),
                "--queries",
                str(corpus),
                "--format",
                "csv",
                "--category",
                "all",
                "--warmup",
                "0",
            ],
            capsys,
        )
        assert code == 0
        rows = list(csv.reader(io.StringIO(stdout)))
        assert rows[0] == ["query", "category", "technique", "elapsed_sec", "top1", "matches"]
        assert sum(1 for r in rows[1:] if r[0] == "AVERAGE") == 3

    def test_markdown_mirrors_technique_columns(self, corpus, index_path, capsys):
        code, stdout, _stderr = run_cli(
            [
                "bench",
                "--index",
                str(index_path),
                "--queries",
                str(corpus),
                "--category",
                "all",
                "--warmup",
                "0",
            ],
            capsys,
        )
        assert code == 0
        header = stdout.splitlines()[0]
        for title in ("Histogram (sec)", "Eigen values (sec)", "Match point (sec)"):
            assert title in header

    def test_out_file_and_comma_list(self, corpus, index_path, tmp_path, capsys):
        idx = load_index(index_path)
        queries = ",".join(str(corpus / r.path) for r in idx.records[:2])
        out = tmp_path / "report.csv"
        code, stdout, stderr = run_cli(
            [
                "bench",
                "--index",
                str(index_path),
                "--queries",
                queries,
                "--format",
                "csv",
                "--out",
                str(out),
                "--techniques",
                "hist",
                "--category",
                "all",
                "--warmup",
                "0",
            ],
            capsys,
        )
        assert code == 0
        assert stdout == ""
        assert out.exists()
        rows = list(csv.reader(io.StringIO(out.read_text())))
        assert len([r for r in rows[1:] if r[0] != "AVERAGE"]) == 2

    def test_no_queries_is_data_error(self, index_path, tmp_path, capsys):
        empty = tmp_path / "empty"
        empty.mkdir()
        code, _stdout, stderr = run_cli(
            ["bench", "--index", str(index_path), "--queries", str(empty)], capsys
        )
        assert code == 2


class TestInspectCommand:
    def test_prints_config_and_categories(self, index_path, capsys):
        code, stdout, _stderr = run_cli(["inspect", "--index", str(index_path)], capsys)
        assert code == 0
        assert "format_version=1" in stdout
        assert "bins=8x4x4" in stdout
        assert "records=4" in stdout
        assert "category=ember count=2 centroid=" in stdout
        assert "category=stone count=2 centroid=" in stdout


class TestExitCodes:
    def test_unknown_subcommand_is_usage_error(self, capsys):
        code, _stdout, stderr = run_cli(["frobnicate"], capsys)
        assert code == 1
        assert "usage" in stderr.lower()

    def test_missing_required_flag_is_usage_error(self, capsys):
        code, _stdout, stderr = run_cli(["query", "x.png"], capsys)
        assert code == 1

    def test_no_subcommand_is_usage_error(self, capsys):
        code, _stdout, _stderr = run_cli([], capsys)
        assert code == 1

    def test_bad_index_file_is_data_error(self, tmp_path, capsys):
        bogus = tmp_path / "bogus.cbir"
        bogus.write_bytes(b"not an index")
        code, _stdout, stderr = run_cli(["inspect", "--index", str(bogus)], capsys)
        assert code == 2
        assert "BadMagicError" in stderr
        assert "Traceback" not in stderr
