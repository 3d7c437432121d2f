"""Corner-based match-point similarity.

Pipeline: Harris corner detection on the grayscale image, fixed-length
normalized intensity-patch descriptors around each corner, nearest-neighbour
matching under a ratio test with bidirectional (mutual) consistency, and a
match count that drives ranking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, EvenPatchError, ImageTooSmallError
from .imaging import ImageFormat, RasterImage

DEFAULT_HARRIS_K = 0.04
DEFAULT_WINDOW = 5
DEFAULT_REL_THRESHOLD = 0.01
DEFAULT_NMS_RADIUS = 3
DEFAULT_PATCH = 9
DEFAULT_RATIO = 0.8
# with a single candidate there is no second neighbour for the ratio test;
# accept only if the squared distance is already this close
SINGLE_CANDIDATE_MAX_SQDIST = 0.5

FLAT_PATCH_NORM = 1e-9


@dataclass(frozen=True)
class Corner:
    """Detected corner location (x right, y down) and its Harris response."""

    x: int
    y: int
    response: float


@dataclass(frozen=True, eq=False)
class FeatureSet:
    """M descriptors of length N with their source coordinates.

    Each descriptor row is zero-mean and unit-norm; ``points`` is an (M, 2)
    array of (x, y) coordinates row-aligned with ``descriptors``.
    """

    descriptors: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return self.descriptors.shape[0]

    @property
    def length(self) -> int:
        return self.descriptors.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureSet):
            return NotImplemented
        return (
            self.descriptors.shape == other.descriptors.shape
            and np.array_equal(self.descriptors, other.descriptors)
            and np.array_equal(self.points, other.points)
        )


@dataclass(frozen=True)
class MatchList:
    """Accepted (index into a, index into b) pairs, injective on both sides."""

    pairs: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.pairs)


def _shift_convolve_1d(padded: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    """Correlate a padded 2-d array with a 1-d kernel along one axis."""
    taps = len(kernel)
    if axis == 1:
        width = padded.shape[1] - taps + 1
        out = np.zeros((padded.shape[0], width))
        for i in range(taps):
            out += kernel[i] * padded[:, i : i + width]
    else:
        height = padded.shape[0] - taps + 1
        out = np.zeros((height, padded.shape[1]))
        for i in range(taps):
            out += kernel[i] * padded[i : i + height, :]
    return out


def _sobel_gradients(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Edge-clamped separable Sobel gradients, same shape as the input."""
    smooth = np.array([1.0, 2.0, 1.0])
    diff = np.array([-1.0, 0.0, 1.0])
    padded = np.pad(img, 1, mode="edge")
    gx = _shift_convolve_1d(_shift_convolve_1d(padded, smooth, axis=0), diff, axis=1)
    gy = _shift_convolve_1d(_shift_convolve_1d(padded, diff, axis=0), smooth, axis=1)
    return gx, gy


def _gaussian_kernel(window: int, sigma: float = 1.0) -> np.ndarray:
    radius = window // 2
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


def _smooth(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    radius = len(kernel) // 2
    padded = np.pad(img, radius, mode="edge")
    return _shift_convolve_1d(_shift_convolve_1d(padded, kernel, axis=0), kernel, axis=1)


def harris_corners(
    gray: RasterImage,
    k: float = DEFAULT_HARRIS_K,
    window: int = DEFAULT_WINDOW,
    rel_threshold: float = DEFAULT_REL_THRESHOLD,
    nms_radius: int = DEFAULT_NMS_RADIUS,
) -> list[Corner]:
    """Harris corner detection with relative thresholding and greedy NMS.

    The per-pixel structure tensor comes from Sobel gradients smoothed with
    a Gaussian-weighted window; the response is det - k * trace^2. Pixels
    with response >= rel_threshold * max(response) survive, strongest first,
    and any corner within ``nms_radius`` (Chebyshev) of an already accepted
    one is suppressed. Output is sorted by descending response.
    """
    if gray.format is not ImageFormat.GRAY8:
        raise ValueError("harris_corners expects a GRAY8 image")
    h, w = gray.data.shape
    if h < window + 2 or w < window + 2:
        raise ImageTooSmallError(f"need at least {window + 2} pixels per side, got {w}x{h}")

    img = gray.data.astype(np.float64)
    gx, gy = _sobel_gradients(img)
    kern = _gaussian_kernel(window)
    sxx = _smooth(gx * gx, kern)
    syy = _smooth(gy * gy, kern)
    sxy = _smooth(gx * gy, kern)
    response = (sxx * syy - sxy * sxy) - k * (sxx + syy) ** 2

    rmax = float(response.max())
    if rmax <= 0.0:
        return []
    cutoff = rel_threshold * rmax
    ys, xs = np.nonzero((response >= cutoff) & (response > 0.0))
    if len(ys) == 0:
        return []
    values = response[ys, xs]
    order = np.lexsort((xs, ys, -values))

    taken = np.zeros((h, w), dtype=bool)
    corners: list[Corner] = []
    r = nms_radius
    for idx in order:
        y, x = int(ys[idx]), int(xs[idx])
        y0, y1 = max(0, y - r), min(h, y + r + 1)
        x0, x1 = max(0, x - r), min(w, x + r + 1)
        if taken[y0:y1, x0:x1].any():
            continue
        taken[y, x] = True
        corners.append(Corner(x=x, y=y, response=float(values[idx])))
    return corners


def extract_descriptors(
    gray: RasterImage, corners: list[Corner], patch: int = DEFAULT_PATCH
) -> FeatureSet:
    """Zero-mean unit-norm intensity patches around each corner.

    Corners whose patch exits the image and corners on flat patches
    (centered norm < 1e-9) are discarded; surviving rows keep corner order.
    """
    if patch % 2 == 0:
        raise EvenPatchError(f"patch size must be odd, got {patch}")
    half = patch // 2
    h, w = gray.data.shape[:2]
    if gray.format is not ImageFormat.GRAY8:
        raise ValueError("extract_descriptors expects a GRAY8 image")

    rows: list[np.ndarray] = []
    points: list[tuple[int, int]] = []
    img = gray.data.astype(np.float64)
    for c in corners:
        if c.x - half < 0 or c.y - half < 0 or c.x + half >= w or c.y + half >= h:
            continue
        block = img[c.y - half : c.y + half + 1, c.x - half : c.x + half + 1].ravel()
        centered = block - block.mean()
        norm = float(np.linalg.norm(centered))
        if norm < FLAT_PATCH_NORM:
            continue
        rows.append(centered / norm)
        points.append((c.x, c.y))

    n = patch * patch
    descriptors = np.array(rows, dtype=np.float64).reshape(len(rows), n)
    pts = np.array(points, dtype=np.int64).reshape(len(points), 2)
    return FeatureSet(descriptors=descriptors, points=pts)


def _squared_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All-pairs squared Euclidean distances, row-chunked to bound memory."""
    out = np.empty((a.shape[0], b.shape[0]))
    step = max(1, 2_000_000 // max(1, b.shape[0] * b.shape[1]))
    for start in range(0, a.shape[0], step):
        diff = a[start : start + step, None, :] - b[None, :, :]
        out[start : start + step] = np.sum(diff * diff, axis=2)
    return out


def _directional_candidates(dist: np.ndarray, ratio: float) -> dict[int, int]:
    """Ratio-accepted nearest-neighbour candidate per row of ``dist``.

    Nearest-neighbour ties go to the smaller column index; with a single
    column the ratio test degenerates to an absolute closeness bound.
    """
    rows, cols = dist.shape
    accepted: dict[int, int] = {}
    nearest = np.argmin(dist, axis=1)
    d1 = dist[np.arange(rows), nearest]
    if cols >= 2:
        d2 = np.partition(dist, 1, axis=1)[:, 1]
        ok = d1 <= (ratio * ratio) * d2
    else:
        ok = d1 <= SINGLE_CANDIDATE_MAX_SQDIST
    for i in range(rows):
        if ok[i]:
            accepted[i] = int(nearest[i])
    return accepted


def match_features(a: FeatureSet, b: FeatureSet, ratio: float = DEFAULT_RATIO) -> MatchList:
    """One-to-one descriptor matches under a ratio test applied both ways.

    A pair (i, j) survives only when j is i's ratio-accepted nearest
    neighbour in b AND i is j's ratio-accepted nearest neighbour in a, which
    makes the result injective on both sides and symmetric under swapping
    the two sets.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    if a.length != b.length:
        raise DimensionMismatchError(
            f"descriptor lengths differ: {a.length} vs {b.length}"
        )
    if a.count == 0 or b.count == 0:
        return MatchList(pairs=())

    dist = _squared_distances(a.descriptors, b.descriptors)
    forward = _directional_candidates(dist, ratio)
    backward = _directional_candidates(dist.T, ratio)
    pairs = tuple(
        (i, j) for i, j in sorted(forward.items()) if backward.get(j) == i
    )
    return MatchList(pairs=pairs)


def match_score(a: FeatureSet, b: FeatureSet, ratio: float = DEFAULT_RATIO) -> tuple[int, float]:
    """Match count plus the distance 1 / (1 + count), so ascending distance
    means descending match count."""
    matches = len(match_features(a, b, ratio))
    return matches, 1.0 / (1.0 + matches)
