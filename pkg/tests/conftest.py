"""Shared fixtures and independent oracle helpers."""

from __future__ import annotations

import io
import math

import numpy as np
import pytest
from PIL import Image

from cbir.edges import CategoryModel, EdgeSignature
from cbir.eigen import SpectralSignature
from cbir.histogram import ColorHistogram, HistogramMetric
from cbir.imaging import RasterImage
from cbir.matchpoint import FeatureSet
from cbir.store import IndexConfig, IndexFile, IndexRecord


def encode_png(arr: np.ndarray) -> bytes:
    """Encode an (h, w[, 3]) uint8 array as PNG bytes."""
    mode = "RGB" if arr.ndim == 3 else "L"
    buf = io.BytesIO()
    Image.fromarray(arr.astype(np.uint8), mode).save(buf, format="PNG")
    return buf.getvalue()


def rgb_image(rng: np.random.Generator, w: int, h: int) -> RasterImage:
    return RasterImage(rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8))


def gray_image(rng: np.random.Generator, w: int, h: int) -> RasterImage:
    return RasterImage(rng.integers(0, 256, size=(h, w), dtype=np.uint8))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


# --- independent matching oracle (loops + exact summation) ---


def oracle_match_pairs(a: np.ndarray, b: np.ndarray, ratio: float) -> list[tuple[int, int]]:
    """Exhaustive distance-table matcher: nearest neighbour with
    smaller-index ties, ratio test (absolute bound 0.5 with one candidate),
    kept only when accepted in both directions."""
    ma, mb = len(a), len(b)
    if ma == 0 or mb == 0:
        return []
    dist = [
        [math.fsum((a[i][k] - b[j][k]) ** 2 for k in range(a.shape[1])) for j in range(mb)]
        for i in range(ma)
    ]

    def candidates(table, rows, cols):
        accepted = {}
        for i in range(rows):
            j1 = 0
            for j in range(1, cols):
                if table[i][j] < table[i][j1]:
                    j1 = j
            d1 = table[i][j1]
            if cols >= 2:
                d2 = min(table[i][j] for j in range(cols) if j != j1)
                ok = d1 <= ratio * ratio * d2
            else:
                ok = d1 <= 0.5
            if ok:
                accepted[i] = j1
        return accepted

    forward = candidates(dist, ma, mb)
    transposed = [[dist[i][j] for i in range(ma)] for j in range(mb)]
    backward = candidates(transposed, mb, ma)
    return sorted((i, j) for i, j in forward.items() if backward.get(j) == i)


def random_descriptor_set(rng: np.random.Generator, m: int, n: int) -> FeatureSet:
    """Random FeatureSet honoring the zero-mean unit-norm row invariant."""
    rows = rng.normal(size=(m, n))
    rows -= rows.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    rows = rows / np.where(norms < 1e-12, 1.0, norms)
    points = rng.integers(0, 10_000, size=(m, 2)).astype(np.int64)
    return FeatureSet(descriptors=rows, points=points)


# --- random index generator for round-trip checks ---


def make_random_index(rng: np.random.Generator) -> IndexFile:
    config = IndexConfig(
        bins_h=int(rng.integers(2, 12)),
        bins_s=int(rng.integers(1, 6)),
        bins_v=int(rng.integers(1, 6)),
        metric=HistogramMetric.L1 if rng.random() < 0.5 else HistogramMetric.INTERSECTION,
        eigen_side=int(rng.integers(4, 80)),
        eigen_k=int(rng.integers(1, 40)),
        harris_k=float(rng.uniform(0.01, 0.1)),
        harris_rel_threshold=float(rng.uniform(0.001, 0.2)),
        ratio=float(rng.uniform(0.3, 0.95)),
        mag_threshold=float(rng.uniform(1, 100)),
    )
    categories = ["café", "vehicle", "animal", "flower"][: int(rng.integers(2, 5))]
    models = [
        CategoryModel(category=c, centroid=rng.normal(size=17)) for c in categories
    ]
    records = []
    total = int(rng.integers(1, 8))
    for i in range(total):
        m = int(rng.integers(0, 6))
        n = int(rng.integers(1, 12))
        records.append(
            IndexRecord(
                image_id=i,
                path=f"{categories[i % len(categories)]}/img_ω_{i}.png",
                category=categories[i % len(categories)],
                histogram=ColorHistogram(
                    values=rng.random(size=config.quantization.total_bins),
                    n=int(rng.integers(1, 1_000_000)),
                ),
                spectral=SpectralSignature(
                    values=rng.normal(size=config.eigen_k),
                    k=config.eigen_k,
                    side=config.eigen_side,
                ),
                features=FeatureSet(
                    descriptors=rng.normal(size=(m, n)),
                    points=rng.integers(0, 4_000_000, size=(m, 2)).astype(np.int64),
                ),
                edge_sig=EdgeSignature(
                    orientation_hist=rng.random(size=16),
                    edge_density=float(rng.random()),
                ),
            )
        )
    return IndexFile(
        format_version=1, config=config, category_models=models, records=records
    )
