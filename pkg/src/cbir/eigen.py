"""Eigenvalue-spectrum image signatures.

The signature of an image is the descending eigenvalue spectrum of the Gram
matrix of its centered, rescaled pixel grid. Eigenvalues come from a cyclic
Jacobi solver written here: plane rotations are orthogonal similarity
transforms, so they preserve the trace and Frobenius norm and converge
unconditionally for symmetric input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    NoConvergenceError,
    NotSymmetricError,
    ShapeMismatchError,
    ZeroDimensionError,
)
from .imaging import RasterImage, resize_bilinear, to_grayscale

DEFAULT_SIDE = 64
DEFAULT_TOP_K = 32
DEFAULT_TOL = 1e-10
DEFAULT_MAX_SWEEPS = 100


@dataclass(frozen=True, eq=False)
class EigenResult:
    """Descending eigenvalues plus the number of Jacobi sweeps used."""

    eigenvalues: np.ndarray
    iterations: int


@dataclass(frozen=True, eq=False)
class SpectralSignature:
    """Top-k eigenvalues (descending, zero-padded when fewer exist) of the
    Gram matrix built at resize dimension ``side``."""

    values: np.ndarray = field(repr=False)
    k: int = DEFAULT_TOP_K
    side: int = DEFAULT_SIDE

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpectralSignature):
            return NotImplemented
        return (
            self.k == other.k
            and self.side == other.side
            and np.array_equal(self.values, other.values)
        )


def _check_symmetric(a: np.ndarray) -> None:
    fro = float(np.linalg.norm(a))
    asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if asym > 1e-12 * max(1.0, fro):
        raise NotSymmetricError(f"matrix is not symmetric (max asymmetry {asym:.3e})")


def _off_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def jacobi_eigh(
    m: np.ndarray,
    tol: float = DEFAULT_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Sweeps row-cyclically over all off-diagonal pairs, rotating each to
    zero, until the off-diagonal norm falls to ``tol`` times the input's
    Frobenius norm.

    Returns (eigenvalues descending, eigenvectors as matching columns,
    sweeps performed). Raises NotSymmetricError for asymmetric input and
    NoConvergenceError if ``max_sweeps`` is exhausted.
    """
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")

    # extreme magnitudes make squared norms under/overflow and defeat the
    # convergence check; work on a rescaled copy and scale eigenvalues back
    magnitude = float(np.max(np.abs(a)))
    rescaled = magnitude > 0.0 and not (1e-100 <= magnitude <= 1e100)
    if rescaled:
        a = a / magnitude
    _check_symmetric(a)

    n = a.shape[0]
    v = np.eye(n)
    threshold = tol * float(np.linalg.norm(a))
    # rotations on elements this small cannot lift off() above threshold
    skip = threshold / (2.0 * n) if n > 1 else 0.0

    sweeps = 0
    converged = _off_norm(a) <= threshold
    while not converged and sweeps < max_sweeps:
        for k in range(n - 1):
            for l in range(k + 1, n):
                akl = a[k, l]
                if abs(akl) <= skip:
                    continue
                theta = (a[l, l] - a[k, k]) / (2.0 * akl)
                if abs(theta) > 1e10:
                    t = 1.0 / (2.0 * theta)
                elif theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(1.0 + theta * theta))
                else:
                    t = 1.0 / (theta - math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c

                row_k = a[k, :].copy()
                row_l = a[l, :].copy()
                a[k, :] = c * row_k - s * row_l
                a[l, :] = s * row_k + c * row_l
                col_k = a[:, k].copy()
                col_l = a[:, l].copy()
                a[:, k] = c * col_k - s * col_l
                a[:, l] = s * col_k + c * col_l
                a[k, l] = a[l, k] = 0.0

                vk = v[:, k].copy()
                vl = v[:, l].copy()
                v[:, k] = c * vk - s * vl
                v[:, l] = s * vk + c * vl
        sweeps += 1
        converged = _off_norm(a) <= threshold

    if not converged:
        raise NoConvergenceError(
            f"off-diagonal norm {_off_norm(a):.3e} above tolerance after {sweeps} sweeps"
        )
    eigenvalues = np.diag(a).copy()
    if rescaled:
        eigenvalues = eigenvalues * magnitude
    order = np.argsort(-eigenvalues, kind="stable")
    return eigenvalues[order], v[:, order], sweeps


def sym_eigenvalues(
    m: np.ndarray,
    tol: float = DEFAULT_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> EigenResult:
    """Descending eigenvalues of a symmetric matrix via cyclic Jacobi."""
    values, _vectors, sweeps = jacobi_eigh(m, tol=tol, max_sweeps=max_sweeps)
    return EigenResult(eigenvalues=values, iterations=sweeps)


def gram_matrix(img: RasterImage, side: int = DEFAULT_SIDE) -> np.ndarray:
    """Gram matrix of the centered image at a fixed resize dimension.

    The image is resized to side x side, rescaled to [0, 1], and centered by
    subtracting its mean; the result is A^T A / side, symmetric positive
    semidefinite (its eigenvalues are scaled squared singular values of A,
    so the spectrum is stable under flips and brightness offsets).
    """
    if side < 1:
        raise ZeroDimensionError(f"resize dimension must be >= 1, got {side}")
    gray = to_grayscale(img)
    small = resize_bilinear(gray, side, side)
    pixels = small.data.astype(np.float64)
    # center on the integer scale (exact), then rescale: constant images
    # annihilate to the exact zero matrix
    a = (pixels - pixels.mean()) / 255.0
    g = a.T @ a / side
    return (g + g.T) / 2.0


def spectral_signature(
    img: RasterImage,
    side: int = DEFAULT_SIDE,
    k: int = DEFAULT_TOP_K,
    tol: float = DEFAULT_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> SpectralSignature:
    """Top-k eigenvalues of the image's Gram matrix, descending.

    When the matrix has fewer than k eigenvalues (side < k) the tail is
    zero-padded, which keeps the vector non-increasing because Gram spectra
    are non-negative.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    result = sym_eigenvalues(gram_matrix(img, side), tol=tol, max_sweeps=max_sweeps)
    values = np.zeros(k, dtype=np.float64)
    take = min(k, len(result.eigenvalues))
    values[:take] = result.eigenvalues[:take]
    return SpectralSignature(values=values, k=k, side=side)


def eigen_distance(a: SpectralSignature, b: SpectralSignature) -> float:
    """Euclidean distance between two spectra of identical shape."""
    if a.k != b.k or a.side != b.side:
        raise ShapeMismatchError(
            f"signatures differ in shape: k={a.k}/{b.k}, side={a.side}/{b.side}"
        )
    return float(np.linalg.norm(a.values - b.values))
