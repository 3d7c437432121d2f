"""Per-category feature indexes: extraction configuration, record assembly,
and the binary on-disk format.

File layout (little-endian throughout): magic ``CBIR`` | u32 format version |
config block | centroid count + centroids | record count + records | CRC-32
of all preceding bytes. Reals are IEEE-754 64-bit, strings are u32 length +
UTF-8 bytes, so save -> load round-trips bit-exactly.
"""

from __future__ import annotations

import os
import struct
import sys
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import edges, eigen, matchpoint
from .errors import (
    BadMagicError,
    ChecksumMismatchError,
    CbirError,
    EmptyCategoryError,
    TooFewCategoriesError,
    TruncatedFileError,
    UnsupportedVersionError,
)
from .edges import CategoryModel, EdgeSignature
from .eigen import SpectralSignature
from .histogram import ColorHistogram, HistogramMetric, HsvQuantization, compute_histogram
from .imaging import RasterImage, load_image, resize_bilinear, to_grayscale
from .matchpoint import FeatureSet

MAGIC = b"CBIR"
FORMAT_VERSION = 1

# classification always happens at this grayscale size so edge signatures
# are comparable across source resolutions
CLASSIFY_SIZE = 256
# corner detection runs on images downscaled to at most this dimension
MATCH_MAX_DIM = 256


@dataclass(frozen=True)
class IndexConfig:
    """Extraction parameters frozen into an index at build time.

    Queries read these back from the index; signatures produced under
    different configurations are never comparable.
    """

    bins_h: int = 8
    bins_s: int = 4
    bins_v: int = 4
    metric: HistogramMetric = HistogramMetric.L1
    eigen_side: int = eigen.DEFAULT_SIDE
    eigen_k: int = eigen.DEFAULT_TOP_K
    harris_k: float = matchpoint.DEFAULT_HARRIS_K
    harris_window: int = matchpoint.DEFAULT_WINDOW
    harris_rel_threshold: float = matchpoint.DEFAULT_REL_THRESHOLD
    nms_radius: int = matchpoint.DEFAULT_NMS_RADIUS
    patch: int = matchpoint.DEFAULT_PATCH
    ratio: float = matchpoint.DEFAULT_RATIO
    mag_threshold: float = edges.DEFAULT_MAG_THRESHOLD

    @property
    def quantization(self) -> HsvQuantization:
        return HsvQuantization(self.bins_h, self.bins_s, self.bins_v)


@dataclass(frozen=True, eq=False)
class IndexRecord:
    """One indexed image: id, source path, category, and all four signatures."""

    image_id: int
    path: str
    category: str
    histogram: ColorHistogram
    spectral: SpectralSignature
    features: FeatureSet
    edge_sig: EdgeSignature

    def __eq__(self, other) -> bool:
        if not isinstance(other, IndexRecord):
            return NotImplemented
        return (
            self.image_id == other.image_id
            and self.path == other.path
            and self.category == other.category
            and self.histogram == other.histogram
            and self.spectral == other.spectral
            and self.features == other.features
            and self.edge_sig == other.edge_sig
        )


@dataclass(frozen=True, eq=False)
class IndexFile:
    """A complete, immutable index: config, category centroids, records."""

    format_version: int
    config: IndexConfig
    category_models: list[CategoryModel]
    records: list[IndexRecord]

    @property
    def categories(self) -> list[str]:
        return [m.category for m in self.category_models]

    def records_for(self, category: str) -> list[IndexRecord]:
        return [r for r in self.records if r.category == category]

    def __eq__(self, other) -> bool:
        if not isinstance(other, IndexFile):
            return NotImplemented
        return (
            self.format_version == other.format_version
            and self.config == other.config
            and self.category_models == other.category_models
            and self.records == other.records
        )


# --- per-image extraction under one config ---


def extract_edge_signature(img: RasterImage, config: IndexConfig) -> EdgeSignature:
    resized = resize_bilinear(to_grayscale(img), CLASSIFY_SIZE, CLASSIFY_SIZE)
    return edges.edge_signature(edges.sobel_edges(resized), config.mag_threshold)


def extract_histogram(img: RasterImage, config: IndexConfig) -> ColorHistogram:
    return compute_histogram(img, config.quantization)


def extract_spectral(img: RasterImage, config: IndexConfig) -> SpectralSignature:
    return eigen.spectral_signature(img, side=config.eigen_side, k=config.eigen_k)


def extract_features(img: RasterImage, config: IndexConfig) -> FeatureSet:
    gray = to_grayscale(img)
    largest = max(gray.width, gray.height)
    if largest > MATCH_MAX_DIM:
        scale = MATCH_MAX_DIM / largest
        gray = resize_bilinear(
            gray,
            max(1, round(gray.width * scale)),
            max(1, round(gray.height * scale)),
        )
    corners = matchpoint.harris_corners(
        gray,
        k=config.harris_k,
        window=config.harris_window,
        rel_threshold=config.harris_rel_threshold,
        nms_radius=config.nms_radius,
    )
    return matchpoint.extract_descriptors(gray, corners, patch=config.patch)


def _extract_all(img: RasterImage, config: IndexConfig):
    return (
        extract_histogram(img, config),
        extract_spectral(img, config),
        extract_features(img, config),
        extract_edge_signature(img, config),
    )


# --- index building ---


def _report_to_stderr(line: str) -> None:
    print(line, file=sys.stderr)


def build_index(
    root: str | Path,
    config: IndexConfig = IndexConfig(),
    workers: int | None = 1,
    report: Callable[[str], None] = _report_to_stderr,
) -> IndexFile:
    """Index every decodable image under ``root``'s category subdirectories.

    The category is the (lowercased) subdirectory name; image ids follow
    ascending lexicographic path order from 0. Undecodable files are skipped
    and reported via ``report``; the build fails only if fewer than two
    categories remain or a category ends up empty. ``workers`` > 1 extracts
    features concurrently (None or 0 picks a size automatically); output is
    identical regardless.
    """
    root = Path(root)
    if not root.is_dir():
        raise EmptyCategoryError(f"corpus root is not a directory: {root}")
    category_dirs = sorted(d for d in root.iterdir() if d.is_dir())
    if len(category_dirs) < 2:
        raise TooFewCategoriesError(
            f"need >= 2 category subdirectories under {root}, found {len(category_dirs)}"
        )

    candidates: list[tuple[str, str]] = []  # (relative posix path, category)
    for d in category_dirs:
        for f in sorted(d.iterdir()):
            if f.is_file():
                candidates.append((f.relative_to(root).as_posix(), d.name.lower()))
    candidates.sort(key=lambda item: item[0])

    decoded: list[tuple[str, str, RasterImage]] = []
    for rel, category in candidates:
        try:
            decoded.append((rel, category, load_image(root / rel)))
        except (CbirError, OSError) as exc:
            report(f"skipped {root / rel}: {exc}")

    def extract_or_error(item):
        try:
            return _extract_all(item[2], config)
        except CbirError as exc:
            return exc

    if workers is None or workers == 0:
        workers = min(8, os.cpu_count() or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            extracted = list(pool.map(extract_or_error, decoded))
    else:
        extracted = [extract_or_error(item) for item in decoded]

    kept: list[tuple[str, str, tuple]] = []
    for (rel, cat, _img), result in zip(decoded, extracted):
        if isinstance(result, CbirError):
            report(f"skipped {root / rel}: {result}")
        else:
            kept.append((rel, cat, result))

    present = {cat for _rel, cat, _sigs in kept}
    for d in category_dirs:
        if d.name.lower() not in present:
            raise EmptyCategoryError(f"category '{d.name.lower()}' has no indexable images")
    if len(present) < 2:
        raise TooFewCategoriesError(f"need >= 2 non-empty categories, got {len(present)}")

    records = [
        IndexRecord(
            image_id=i,
            path=rel,
            category=cat,
            histogram=hist,
            spectral=spec,
            features=feats,
            edge_sig=sig,
        )
        for i, (rel, cat, (hist, spec, feats, sig)) in enumerate(kept)
    ]
    models = edges.train_centroids([(r.category, r.edge_sig) for r in records])
    return IndexFile(
        format_version=FORMAT_VERSION,
        config=config,
        category_models=models,
        records=records,
    )


# --- binary serialization ---


def _pack_str(out: bytearray, s: str) -> None:
    raw = s.encode("utf-8")
    out += struct.pack("<I", len(raw))
    out += raw


def _pack_f64s(out: bytearray, values: np.ndarray) -> None:
    out += np.ascontiguousarray(values, dtype="<f8").tobytes()


def save_index(idx: IndexFile, path: str | Path) -> None:
    """Write an index; reals are preserved bit-exactly (see module docs)."""
    out = bytearray()
    out += MAGIC
    out += struct.pack("<I", idx.format_version)

    cfg = idx.config
    out += struct.pack("<III", cfg.bins_h, cfg.bins_s, cfg.bins_v)
    _pack_str(out, cfg.metric.value)
    out += struct.pack("<II", cfg.eigen_side, cfg.eigen_k)
    out += struct.pack("<dIdI", cfg.harris_k, cfg.harris_window, cfg.harris_rel_threshold, cfg.nms_radius)
    out += struct.pack("<Idd", cfg.patch, cfg.ratio, cfg.mag_threshold)

    out += struct.pack("<I", len(idx.category_models))
    for model in idx.category_models:
        _pack_str(out, model.category)
        out += struct.pack("<I", len(model.centroid))
        _pack_f64s(out, model.centroid)

    out += struct.pack("<I", len(idx.records))
    for rec in idx.records:
        out += struct.pack("<I", rec.image_id)
        _pack_str(out, rec.path)
        _pack_str(out, rec.category)
        out += struct.pack("<IQ", len(rec.histogram.values), rec.histogram.n)
        _pack_f64s(out, rec.histogram.values)
        out += struct.pack("<III", len(rec.spectral.values), rec.spectral.k, rec.spectral.side)
        _pack_f64s(out, rec.spectral.values)
        feats = rec.features
        out += struct.pack("<II", feats.count, feats.length)
        _pack_f64s(out, feats.descriptors.ravel())
        for x, y in feats.points:
            out += struct.pack("<II", int(x), int(y))
        out += struct.pack("<I", len(rec.edge_sig.orientation_hist))
        _pack_f64s(out, rec.edge_sig.orientation_hist)
        out += struct.pack("<d", rec.edge_sig.edge_density)

    out += struct.pack("<I", zlib.crc32(bytes(out)))
    Path(path).write_bytes(bytes(out))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedFileError(
                f"file ends at byte {len(self.data)}, needed {self.pos + n}"
            )
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def read_str(self) -> str:
        (length,) = self.unpack("<I")
        return self.take(length).decode("utf-8")

    def read_f64s(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(8 * count), dtype="<f8").astype(np.float64)


def load_index(path: str | Path) -> IndexFile:
    """Read an index written by save_index, verifying structure and checksum."""
    data = Path(path).read_bytes()
    if len(data) < 4:
        raise TruncatedFileError(f"file has only {len(data)} bytes")
    if data[:4] != MAGIC:
        raise BadMagicError(f"bad leading magic {data[:4]!r}, expected {MAGIC!r}")

    r = _Reader(data)
    r.take(4)  # magic
    (version,) = r.unpack("<I")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"format version {version} not supported (expected {FORMAT_VERSION})")

    bins_h, bins_s, bins_v = r.unpack("<III")
    metric = HistogramMetric(r.read_str())
    eigen_side, eigen_k = r.unpack("<II")
    harris_k, harris_window, harris_rel_threshold, nms_radius = r.unpack("<dIdI")
    patch, ratio, mag_threshold = r.unpack("<Idd")
    config = IndexConfig(
        bins_h=bins_h,
        bins_s=bins_s,
        bins_v=bins_v,
        metric=metric,
        eigen_side=eigen_side,
        eigen_k=eigen_k,
        harris_k=harris_k,
        harris_window=harris_window,
        harris_rel_threshold=harris_rel_threshold,
        nms_radius=nms_radius,
        patch=patch,
        ratio=ratio,
        mag_threshold=mag_threshold,
    )

    (n_models,) = r.unpack("<I")
    models = []
    for _ in range(n_models):
        category = r.read_str()
        (dim,) = r.unpack("<I")
        models.append(CategoryModel(category=category, centroid=r.read_f64s(dim)))

    (n_records,) = r.unpack("<I")
    records = []
    for _ in range(n_records):
        (image_id,) = r.unpack("<I")
        rec_path = r.read_str()
        category = r.read_str()
        hist_len, n_pixels = r.unpack("<IQ")
        hist = ColorHistogram(values=r.read_f64s(hist_len), n=n_pixels)
        spec_len, k, side = r.unpack("<III")
        spectral = SpectralSignature(values=r.read_f64s(spec_len), k=k, side=side)
        m, n = r.unpack("<II")
        descriptors = r.read_f64s(m * n).reshape(m, n)
        points = np.array(
            [r.unpack("<II") for _ in range(m)], dtype=np.int64
        ).reshape(m, 2)
        features = FeatureSet(descriptors=descriptors, points=points)
        (bins,) = r.unpack("<I")
        hist_vec = r.read_f64s(bins)
        (density,) = r.unpack("<d")
        edge_sig = EdgeSignature(orientation_hist=hist_vec, edge_density=density)
        records.append(
            IndexRecord(
                image_id=image_id,
                path=rec_path,
                category=category,
                histogram=hist,
                spectral=spectral,
                features=features,
                edge_sig=edge_sig,
            )
        )

    (stored_crc,) = r.unpack("<I")
    if r.pos != len(data):
        raise ChecksumMismatchError(f"{len(data) - r.pos} trailing bytes after checksum")
    actual_crc = zlib.crc32(data[: len(data) - 4])
    if stored_crc != actual_crc:
        raise ChecksumMismatchError(
            f"stored CRC {stored_crc:#010x} != computed {actual_crc:#010x}"
        )
    return IndexFile(
        format_version=version,
        config=config,
        category_models=models,
        records=records,
    )
