"""Global HSV color histograms: uniform quantization, the normalized
bin-proportion vector, and histogram distances."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import LengthMismatchError
from .imaging import HsvPixel, ImageFormat, RasterImage, rgb_to_hsv_arrays


class HistogramMetric(Enum):
    L1 = "l1"
    INTERSECTION = "intersection"


@dataclass(frozen=True)
class HsvQuantization:
    """Uniform per-channel bin counts; total bins L = h * s * v."""

    bins_h: int = 8
    bins_s: int = 4
    bins_v: int = 4

    def __post_init__(self):
        if self.bins_h < 1 or self.bins_s < 1 or self.bins_v < 1:
            raise ValueError("all bin counts must be >= 1")
        if self.total_bins < 2:
            raise ValueError("total bin count L must be >= 2")

    @property
    def total_bins(self) -> int:
        return self.bins_h * self.bins_s * self.bins_v


@dataclass(frozen=True, eq=False)
class ColorHistogram:
    """Normalized bin proportions h_k = n_k / n over L quantized colors."""

    values: np.ndarray = field(repr=False)
    n: int = 0

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ColorHistogram):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)


def quantize_hsv(px: HsvPixel, q: HsvQuantization) -> int:
    """Flat bin index of one HSV pixel under uniform quantization."""
    ih = min(int(px.h / 360.0 * q.bins_h), q.bins_h - 1)
    is_ = min(int(px.s * q.bins_s), q.bins_s - 1)
    iv = min(int(px.v * q.bins_v), q.bins_v - 1)
    return ih * q.bins_s * q.bins_v + is_ * q.bins_v + iv


def compute_histogram(img: RasterImage, q: HsvQuantization) -> ColorHistogram:
    """Quantized-color proportions over every pixel of an RGB8 image.

    A pure global statistic: any permutation of the pixels yields the same
    histogram, and the values always sum to 1.
    """
    if img.format is not ImageFormat.RGB8:
        raise ValueError("compute_histogram expects an RGB8 image")
    flat = img.data.reshape(-1, 3)
    h, s, v = rgb_to_hsv_arrays(flat)
    ih = np.minimum((h / 360.0 * q.bins_h).astype(np.intp), q.bins_h - 1)
    is_ = np.minimum((s * q.bins_s).astype(np.intp), q.bins_s - 1)
    iv = np.minimum((v * q.bins_v).astype(np.intp), q.bins_v - 1)
    k = ih * (q.bins_s * q.bins_v) + is_ * q.bins_v + iv
    counts = np.bincount(k, minlength=q.total_bins).astype(np.float64)
    n = flat.shape[0]
    return ColorHistogram(values=counts / n, n=n)


def hist_distance(
    a: ColorHistogram, b: ColorHistogram, metric: HistogramMetric = HistogramMetric.L1
) -> float:
    """L1 distance (in [0, 2]) or intersection distance (in [0, 1]).

    Both are 0 exactly when the normalized histograms are identical.
    """
    if len(a.values) != len(b.values):
        raise LengthMismatchError(
            f"histograms have different bin counts: {len(a.values)} vs {len(b.values)}"
        )
    if metric is HistogramMetric.L1:
        return float(np.sum(np.abs(a.values - b.values)))
    return float(1.0 - np.sum(np.minimum(a.values, b.values)))
