"""Image decoding and pixel-level primitives shared by all feature extractors."""

from __future__ import annotations

import io
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import CorruptStreamError, UnsupportedFormatError, ZeroDimensionError

# ITU-R BT.601 luma weights
LUMA_R, LUMA_G, LUMA_B = 0.299, 0.587, 0.114

_SIGNATURES = (
    (b"\x89PNG\r\n\x1a\n", "png"),
    (b"\xff\xd8\xff", "jpeg"),
    (b"BM", "bmp"),
)


class ImageFormat(Enum):
    RGB8 = "rgb8"
    GRAY8 = "gray8"


@dataclass(frozen=True, eq=False)
class RasterImage:
    """Decoded pixel grid.

    ``data`` is a read-only uint8 array, shape (height, width, 3) for RGB8
    or (height, width) for GRAY8, row-major.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.dtype != np.uint8:
            raise ValueError(f"expected uint8 pixel data, got dtype {arr.dtype}")
        arr = np.ascontiguousarray(arr)
        if arr.ndim == 3 and arr.shape[2] == 3:
            pass
        elif arr.ndim == 2:
            pass
        else:
            raise ValueError(f"expected (h, w) or (h, w, 3) uint8 array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ZeroDimensionError(f"image dimensions must be >= 1, got {arr.shape[1]}x{arr.shape[0]}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def format(self) -> ImageFormat:
        return ImageFormat.RGB8 if self.data.ndim == 3 else ImageFormat.GRAY8

    @property
    def channels(self) -> int:
        return 3 if self.data.ndim == 3 else 1

    @property
    def pixels(self) -> bytes:
        """Row-major byte sequence (length = width * height * channels)."""
        return self.data.tobytes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.data.shape == other.data.shape and self.pixels == other.pixels

    def __repr__(self) -> str:
        return f"RasterImage({self.width}x{self.height} {self.format.name})"


@dataclass(frozen=True)
class HsvPixel:
    """Hue in [0, 360) degrees, saturation and value in [0, 1].

    Achromatic pixels (s == 0) carry hue 0 by convention.
    """

    h: float
    s: float
    v: float


def decode_image(data: bytes) -> RasterImage:
    """Decode a PNG/JPEG/BMP byte stream into an RGB8 RasterImage.

    Alpha channels are discarded; grayscale and paletted sources are
    expanded to RGB (grayscale by channel triplication).
    """
    for magic, _name in _SIGNATURES:
        if data[: len(magic)] == magic:
            break
    else:
        raise UnsupportedFormatError("unrecognized image signature (expected PNG, JPEG, or BMP)")
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            if im.width == 0 or im.height == 0:
                raise ZeroDimensionError("decoded image has a zero dimension")
            rgb = im.convert("RGB")
            arr = np.asarray(rgb, dtype=np.uint8)
    except ZeroDimensionError:
        raise
    except Exception as exc:
        raise CorruptStreamError(f"failed to decode image stream: {exc}") from exc
    return RasterImage(arr)


def load_image(path: str | Path) -> RasterImage:
    """Read an image file from disk and decode it."""
    return decode_image(Path(path).read_bytes())


def to_grayscale(img: RasterImage) -> RasterImage:
    """BT.601 luma conversion; GRAY8 input is returned unchanged."""
    if img.format is ImageFormat.GRAY8:
        return img
    rgb = img.data.astype(np.float64)
    luma = LUMA_R * rgb[:, :, 0] + LUMA_G * rgb[:, :, 1] + LUMA_B * rgb[:, :, 2]
    return RasterImage(np.clip(np.rint(luma), 0, 255).astype(np.uint8))


def resize_bilinear(img: RasterImage, out_w: int, out_h: int) -> RasterImage:
    """Bilinear resize with half-pixel centers and edge-clamped sampling.

    Preserves the input format. Resizing to the input's own dimensions is
    pixel-identical; outputs never overshoot the input's value range.
    """
    if out_w < 1 or out_h < 1:
        raise ZeroDimensionError(f"target dimensions must be >= 1, got {out_w}x{out_h}")
    in_h, in_w = img.data.shape[:2]

    sx = np.clip((np.arange(out_w) + 0.5) * (in_w / out_w) - 0.5, 0.0, in_w - 1.0)
    sy = np.clip((np.arange(out_h) + 0.5) * (in_h / out_h) - 0.5, 0.0, in_h - 1.0)
    x0 = np.floor(sx).astype(np.intp)
    y0 = np.floor(sy).astype(np.intp)
    x1 = np.minimum(x0 + 1, in_w - 1)
    y1 = np.minimum(y0 + 1, in_h - 1)
    fx = sx - x0
    fy = sy - y0

    data = img.data.astype(np.float64)
    if data.ndim == 3:
        fx = fx[None, :, None]
        fy = fy[:, None, None]
    else:
        fx = fx[None, :]
        fy = fy[:, None]

    top = data[y0[:, None], x0[None, :]] * (1.0 - fx) + data[y0[:, None], x1[None, :]] * fx
    bottom = data[y1[:, None], x0[None, :]] * (1.0 - fx) + data[y1[:, None], x1[None, :]] * fx
    out = top * (1.0 - fy) + bottom * fy
    return RasterImage(np.clip(np.rint(out), 0, 255).astype(np.uint8))


def rgb_to_hsv(r: int, g: int, b: int) -> HsvPixel:
    """Standard hexcone conversion of one 8-bit RGB triple."""
    rf, gf, bf = float(r), float(g), float(b)
    mx = max(rf, gf, bf)
    mn = min(rf, gf, bf)
    delta = mx - mn
    v = mx / 255.0
    s = 0.0 if mx == 0.0 else delta / mx
    if delta == 0.0:
        h = 0.0
    elif mx == rf:
        h = 60.0 * ((gf - bf) / delta)
        if h < 0.0:
            h += 360.0
    elif mx == gf:
        h = 60.0 * ((bf - rf) / delta) + 120.0
    else:
        h = 60.0 * ((rf - gf) / delta) + 240.0
    if h == 360.0:
        h = 0.0
    return HsvPixel(h, s, v)


def rgb_to_hsv_arrays(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized hexcone conversion of an (n, 3) uint8 array.

    Element-for-element identical to rgb_to_hsv (same expression order, so
    the floating-point results match bit-exactly).
    """
    px = np.asarray(rgb, dtype=np.float64)
    r, g, b = px[:, 0], px[:, 1], px[:, 2]
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = mx - mn
    v = mx / 255.0
    s = np.where(mx == 0.0, 0.0, delta / np.where(mx == 0.0, 1.0, mx))

    dsafe = np.where(delta == 0.0, 1.0, delta)
    hr = 60.0 * ((g - b) / dsafe)
    hr = np.where(hr < 0.0, hr + 360.0, hr)
    hg = 60.0 * ((b - r) / dsafe) + 120.0
    hb = 60.0 * ((r - g) / dsafe) + 240.0
    h = np.where(delta == 0.0, 0.0, np.where(mx == r, hr, np.where(mx == g, hg, hb)))
    h = np.where(h == 360.0, 0.0, h)
    return h, s, v
