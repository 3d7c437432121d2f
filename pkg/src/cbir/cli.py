"""Command-line interface: build indexes, classify, query, benchmark, inspect.

Exit codes: 0 success, 1 usage error, 2 data error. Results go to stdout,
diagnostics to stderr. Extraction parameters are fixed at index build time;
query-time commands read them back from the index.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .bench import ReportFormat, emit_report, run_benchmark
from .edges import classify
from .engine import SCOPE_AUTO, Technique, query
from .errors import CbirError
from .histogram import HistogramMetric
from .imaging import load_image
from .store import IndexConfig, build_index, extract_edge_signature, load_index, save_index

_TECHNIQUES = {
    "hist": Technique.HISTOGRAM,
    "eigen": Technique.EIGEN,
    "match": Technique.MATCHPOINT,
}

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp"}


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; exit code 2 is reserved for data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="cbir", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_index = sub.add_parser("index", help="build an index from a category directory tree")
    p_index.add_argument("directory")
    p_index.add_argument("--out", required=True)
    p_index.add_argument("--bins", nargs=3, type=int, default=[8, 4, 4], metavar=("H", "S", "V"))
    p_index.add_argument("--metric", choices=[m.value for m in HistogramMetric], default="l1")
    p_index.add_argument("--eigen-side", type=int, default=64)
    p_index.add_argument("--eigen-k", type=int, default=32)
    p_index.add_argument("--harris-k", type=float, default=0.04)
    p_index.add_argument("--rel-threshold", type=float, default=0.01)
    p_index.add_argument("--patch", type=int, default=9)
    p_index.add_argument("--ratio", type=float, default=0.8)
    p_index.add_argument("--mag-threshold", type=float, default=32.0)

    p_classify = sub.add_parser("classify", help="print the query image's category")
    p_classify.add_argument("image")
    p_classify.add_argument("--index", required=True)

    p_query = sub.add_parser("query", help="retrieve the most similar indexed images")
    p_query.add_argument("image")
    p_query.add_argument("--index", required=True)
    p_query.add_argument("--technique", choices=sorted(_TECHNIQUES), required=True)
    p_query.add_argument("--top-k", type=int, default=10)
    p_query.add_argument("--category", default=SCOPE_AUTO, help="auto, all, or a category label")

    p_bench = sub.add_parser("bench", help="time queries under each technique")
    p_bench.add_argument("--index", required=True)
    p_bench.add_argument("--queries", required=True, help="directory of images, or comma-separated paths")
    p_bench.add_argument("--techniques", nargs="+", choices=sorted(_TECHNIQUES), default=sorted(_TECHNIQUES))
    p_bench.add_argument("--format", choices=[f.value for f in ReportFormat], default="md")
    p_bench.add_argument("--out")
    p_bench.add_argument("--category", default=SCOPE_AUTO, help="auto, all, or a category label")
    p_bench.add_argument("--warmup", type=int, default=1)

    p_inspect = sub.add_parser("inspect", help="print index config, counts, and centroids")
    p_inspect.add_argument("--index", required=True)
    return parser


def _workers_from_env() -> int | None:
    raw = os.environ.get("CBIR_THREADS", "").strip()
    if not raw:
        return None
    count = int(raw)
    return None if count == 0 else count


def _cmd_index(args) -> int:
    config = IndexConfig(
        bins_h=args.bins[0],
        bins_s=args.bins[1],
        bins_v=args.bins[2],
        metric=HistogramMetric(args.metric),
        eigen_side=args.eigen_side,
        eigen_k=args.eigen_k,
        harris_k=args.harris_k,
        harris_rel_threshold=args.rel_threshold,
        patch=args.patch,
        ratio=args.ratio,
        mag_threshold=args.mag_threshold,
    )
    idx = build_index(args.directory, config=config, workers=_workers_from_env())
    save_index(idx, args.out)
    print(
        f"indexed {len(idx.records)} images across {len(idx.categories)} categories -> {args.out}",
        file=sys.stderr,
    )
    return 0


def _cmd_classify(args) -> int:
    idx = load_index(args.index)
    sig = extract_edge_signature(load_image(args.image), idx.config)
    category, margin = classify(sig, idx.category_models)
    print("category,margin")
    print(f"{category},{margin:.6f}")
    return 0


def _cmd_query(args) -> int:
    idx = load_index(args.index)
    result = query(
        idx,
        load_image(args.image),
        _TECHNIQUES[args.technique],
        top_k=args.top_k,
        scope=args.category,
    )
    paths = {r.image_id: r.path for r in idx.records}
    print("rank,image_id,distance,path")
    for position, (image_id, distance) in enumerate(result.ranked, start=1):
        print(f"{position},{image_id},{distance:.6f},{paths[image_id]}")
    print(
        f"category={result.category_used} candidates={result.candidates_searched} "
        f"elapsed={result.elapsed:.6f}s",
        file=sys.stderr,
    )
    return 0


def _collect_queries(spec: str) -> list[str]:
    path = Path(spec)
    if path.is_dir():
        files = [
            p for p in sorted(path.rglob("*"))
            if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES
        ]
        return [str(p) for p in files]
    return [part for part in spec.split(",") if part]


def _cmd_bench(args) -> int:
    idx = load_index(args.index)
    queries = _collect_queries(args.queries)
    if not queries:
        raise CbirError(f"no query images found for '{args.queries}'")
    techniques = [_TECHNIQUES[name] for name in args.techniques]
    report = run_benchmark(idx, queries, techniques=techniques, scope=args.category, warmup=args.warmup)
    text = emit_report(report, ReportFormat(args.format))
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote report to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_inspect(args) -> int:
    idx = load_index(args.index)
    cfg = idx.config
    print(f"format_version={idx.format_version}")
    print(f"bins={cfg.bins_h}x{cfg.bins_s}x{cfg.bins_v}")
    print(f"metric={cfg.metric.value}")
    print(f"eigen_side={cfg.eigen_side}")
    print(f"eigen_k={cfg.eigen_k}")
    print(f"harris_k={cfg.harris_k}")
    print(f"harris_window={cfg.harris_window}")
    print(f"harris_rel_threshold={cfg.harris_rel_threshold}")
    print(f"nms_radius={cfg.nms_radius}")
    print(f"patch={cfg.patch}")
    print(f"ratio={cfg.ratio}")
    print(f"mag_threshold={cfg.mag_threshold}")
    print(f"records={len(idx.records)}")
    for model in idx.category_models:
        count = len(idx.records_for(model.category))
        centroid = " ".join(f"{x:.6f}" for x in model.centroid)
        print(f"category={model.category} count={count} centroid={centroid}")
    return 0


_COMMANDS = {
    "index": _cmd_index,
    "classify": _cmd_classify,
    "query": _cmd_query,
    "bench": _cmd_bench,
    "inspect": _cmd_inspect,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (CbirError, OSError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
