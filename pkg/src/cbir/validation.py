"""Input coercion and validation helpers for the estimator layer."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .imaging import RasterImage, decode_image, load_image


def as_raster_image(x) -> RasterImage:
    """Coerce one sample to a RasterImage.

    Accepts a RasterImage, a filesystem path, an encoded byte stream, or a
    uint8 array shaped (h, w) / (h, w, 3).
    """
    if isinstance(x, RasterImage):
        return x
    if isinstance(x, (str, Path)):
        return load_image(x)
    if isinstance(x, (bytes, bytearray)):
        return decode_image(bytes(x))
    if isinstance(x, np.ndarray):
        return RasterImage(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as an image")


def as_image_list(X) -> list[RasterImage]:
    """Coerce a sequence of samples (see as_raster_image) to images."""
    if isinstance(X, (RasterImage, str, Path, bytes, bytearray)):
        raise TypeError("expected a sequence of images, got a single sample")
    return [as_raster_image(x) for x in X]
