"""Edge analysis and the nearest-centroid category classifier.

A query image's database category is decided before searching: Sobel
gradients give an orientation histogram plus an edge-density measure, and
the nearest category centroid (trained from the indexed corpus) wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyInputError,
    ImageTooSmallError,
    NoModelsError,
    TooFewCategoriesError,
)
from .imaging import ImageFormat, RasterImage

ORIENTATION_BINS = 16
DEFAULT_MAG_THRESHOLD = 32.0

_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_SOBEL_Y = np.array([[-1, -2, -1], [0, 0, 0], [1, 2, 1]], dtype=np.float64)


@dataclass(frozen=True, eq=False)
class EdgeMap:
    """Per-pixel gradient magnitude (>= 0) and orientation in [0, pi)."""

    magnitude: np.ndarray
    orientation: np.ndarray

    @property
    def height(self) -> int:
        return self.magnitude.shape[0]

    @property
    def width(self) -> int:
        return self.magnitude.shape[1]


@dataclass(frozen=True, eq=False)
class EdgeSignature:
    """Orientation histogram over edge pixels plus the edge-density fraction.

    The histogram has ORIENTATION_BINS entries summing to 1 when any edge
    pixel exists, and is all-zero otherwise.
    """

    orientation_hist: np.ndarray
    edge_density: float

    def as_vector(self) -> np.ndarray:
        """Histogram plus density as one flat vector (classifier feature)."""
        return np.concatenate([self.orientation_hist, [self.edge_density]])

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeSignature):
            return NotImplemented
        return (
            np.array_equal(self.orientation_hist, other.orientation_hist)
            and self.edge_density == other.edge_density
        )


@dataclass(frozen=True, eq=False)
class CategoryModel:
    """A category label with the mean signature vector of its training set."""

    category: str
    centroid: np.ndarray = field(repr=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CategoryModel):
            return NotImplemented
        return self.category == other.category and np.array_equal(self.centroid, other.centroid)


def sobel_edges(gray: RasterImage) -> EdgeMap:
    """3x3 Sobel gradients of a GRAY8 image.

    Magnitude is sqrt(gx^2 + gy^2); orientation is the gradient direction
    folded into [0, pi). The one-pixel border is assigned magnitude 0.
    """
    if gray.format is not ImageFormat.GRAY8:
        raise ValueError("sobel_edges expects a GRAY8 image")
    h, w = gray.data.shape
    if h < 3 or w < 3:
        raise ImageTooSmallError(f"need at least 3x3 pixels for Sobel, got {w}x{h}")

    img = gray.data.astype(np.float64)
    gx = np.zeros((h, w))
    gy = np.zeros((h, w))
    for dy in range(3):
        for dx in range(3):
            window = img[dy : h - 2 + dy, dx : w - 2 + dx]
            gx[1:-1, 1:-1] += _SOBEL_X[dy, dx] * window
            gy[1:-1, 1:-1] += _SOBEL_Y[dy, dx] * window

    magnitude = np.hypot(gx, gy)
    orientation = np.mod(np.arctan2(gy, gx), math.pi)
    # mod can round up to pi itself; fold that back to 0
    orientation[orientation >= math.pi] = 0.0
    orientation[magnitude == 0.0] = 0.0
    magnitude[0, :] = magnitude[-1, :] = 0.0
    magnitude[:, 0] = magnitude[:, -1] = 0.0
    return EdgeMap(magnitude=magnitude, orientation=orientation)


def edge_signature(edges: EdgeMap, mag_threshold: float = DEFAULT_MAG_THRESHOLD) -> EdgeSignature:
    """Histogram of edge-pixel orientations (16 equal bins over [0, pi))
    normalized to sum 1, plus edge density = edge pixels / all pixels."""
    if mag_threshold <= 0:
        raise ValueError(f"mag_threshold must be > 0, got {mag_threshold}")
    mask = edges.magnitude >= mag_threshold
    count = int(np.count_nonzero(mask))
    hist = np.zeros(ORIENTATION_BINS, dtype=np.float64)
    if count > 0:
        bins = np.floor(edges.orientation[mask] / math.pi * ORIENTATION_BINS).astype(np.intp)
        np.clip(bins, 0, ORIENTATION_BINS - 1, out=bins)
        hist = np.bincount(bins, minlength=ORIENTATION_BINS).astype(np.float64) / count
    density = count / (edges.width * edges.height)
    return EdgeSignature(orientation_hist=hist, edge_density=density)


def train_centroids(labeled: list[tuple[str, EdgeSignature]]) -> list[CategoryModel]:
    """One CategoryModel per distinct category, centroid = component-wise mean.

    Models are returned in ascending category order. Raises EmptyInputError
    with no signatures and TooFewCategoriesError with fewer than two
    distinct categories.
    """
    if not labeled:
        raise EmptyInputError("no training signatures supplied")
    grouped: dict[str, list[np.ndarray]] = {}
    for category, sig in labeled:
        grouped.setdefault(category, []).append(sig.as_vector())
    if len(grouped) < 2:
        raise TooFewCategoriesError(f"need >= 2 distinct categories, got {len(grouped)}")
    return [
        CategoryModel(category=cat, centroid=np.mean(grouped[cat], axis=0))
        for cat in sorted(grouped)
    ]


def classify(sig: EdgeSignature, models: list[CategoryModel]) -> tuple[str, float]:
    """Nearest centroid by Euclidean distance over the signature vector.

    Returns (category, margin) where margin is the gap between the
    second-nearest and nearest distances (+inf with a single model).
    Distance ties go to the lexicographically smaller category label.
    """
    if not models:
        raise NoModelsError("no category models supplied")
    vec = sig.as_vector()
    scored = sorted(
        (float(np.linalg.norm(vec - m.centroid)), m.category) for m in models
    )
    best_dist, best_cat = scored[0]
    margin = scored[1][0] - best_dist if len(scored) > 1 else math.inf
    return best_cat, margin
