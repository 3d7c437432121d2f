"""Deterministic synthetic image corpora.

Two generators: a four-category demo corpus (face / vehicle / animal /
flower, each image a seeded random composition with plenty of corner and
color structure) and a pattern corpus with edge-structure-distinct
categories for classifier checks. Both write PNG trees with one
subdirectory per category, the layout ``build_index`` expects.

Usage: ``python -m cbir.datasets OUTDIR [--kind demo|patterns] ...``
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from PIL import Image

DEMO_CATEGORIES = ("animal", "face", "flower", "vehicle")
PATTERN_CATEGORIES = ("checker", "hstripes", "noise", "vstripes")


def _canvas(size: int, color) -> np.ndarray:
    img = np.zeros((size, size, 3), dtype=np.float64)
    img[:, :] = color
    return img


def _fill_rect(img, x0, y0, x1, y1, color) -> None:
    h, w = img.shape[:2]
    img[max(0, y0) : min(h, y1), max(0, x0) : min(w, x1)] = color


def _fill_ellipse(img, cx, cy, rx, ry, color, angle=0.0) -> None:
    h, w = img.shape[:2]
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    ca, sa = math.cos(angle), math.sin(angle)
    u = (xx - cx) * ca + (yy - cy) * sa
    v = -(xx - cx) * sa + (yy - cy) * ca
    img[(u / rx) ** 2 + (v / ry) ** 2 <= 1.0] = color


def _face(rng: np.random.Generator, size: int) -> np.ndarray:
    top = rng.uniform(120, 200, size=3)
    bottom = rng.uniform(40, 120, size=3)
    t = np.linspace(0.0, 1.0, size)[:, None, None]
    img = top * (1 - t) + bottom * t * np.ones((size, size, 3))
    skin = rng.uniform([150, 110, 80], [230, 190, 160])
    cx, cy = size / 2 + rng.uniform(-15, 15), size / 2 + rng.uniform(-15, 15)
    rx, ry = rng.uniform(0.22, 0.3) * size, rng.uniform(0.3, 0.38) * size
    _fill_ellipse(img, cx, cy, rx, ry, skin)
    eye = rng.uniform(10, 60, size=3)
    eye_dx = rx * 0.45
    eye_w = max(3, int(size * rng.uniform(0.02, 0.05)))
    for side in (-1, 1):
        ex = int(cx + side * eye_dx)
        ey = int(cy - ry * 0.25)
        _fill_rect(img, ex - eye_w, ey - eye_w, ex + eye_w, ey + eye_w, eye)
    _fill_rect(
        img,
        int(cx - eye_w),
        int(cy + ry * 0.05),
        int(cx + eye_w),
        int(cy + ry * 0.25),
        skin * 0.8,
    )
    mouth = rng.uniform([120, 20, 20], [200, 80, 80])
    _fill_rect(
        img,
        int(cx - rx * 0.4),
        int(cy + ry * 0.5),
        int(cx + rx * 0.4),
        int(cy + ry * 0.6),
        mouth,
    )
    return img


def _vehicle(rng: np.random.Generator, size: int) -> np.ndarray:
    sky = rng.uniform([120, 150, 190], [180, 210, 250])
    road = rng.uniform(60, 110, size=3)
    img = _canvas(size, sky)
    horizon = int(size * rng.uniform(0.55, 0.7))
    _fill_rect(img, 0, horizon, size, size, road)
    body = rng.uniform(30, 220, size=3)
    x0 = int(size * rng.uniform(0.1, 0.25))
    x1 = int(size * rng.uniform(0.75, 0.9))
    y1 = horizon + int(size * 0.08)
    y0 = y1 - int(size * rng.uniform(0.18, 0.25))
    _fill_rect(img, x0, y0, x1, y1, body)
    cab_x0 = x0 + int((x1 - x0) * rng.uniform(0.15, 0.3))
    cab_x1 = x1 - int((x1 - x0) * rng.uniform(0.15, 0.3))
    cab_y0 = y0 - int(size * rng.uniform(0.1, 0.16))
    _fill_rect(img, cab_x0, cab_y0, cab_x1, y0, body * 0.85)
    _fill_rect(
        img,
        cab_x0 + 4,
        cab_y0 + 4,
        cab_x1 - 4,
        y0 - 2,
        rng.uniform([160, 190, 210], [200, 230, 255]),
    )
    wheel = rng.uniform(5, 30, size=3)
    r = int(size * 0.05)
    for wx in (x0 + int((x1 - x0) * 0.22), x1 - int((x1 - x0) * 0.22)):
        _fill_rect(img, wx - r, y1 - r, wx + r, y1 + r, wheel)
    return img


def _animal(rng: np.random.Generator, size: int) -> np.ndarray:
    grass = rng.uniform([40, 90, 30], [90, 160, 80])
    img = _canvas(size, grass)
    fur = rng.uniform([90, 60, 30], [190, 150, 110])
    cx, cy = size * rng.uniform(0.4, 0.6), size * rng.uniform(0.45, 0.6)
    _fill_ellipse(img, cx, cy, size * 0.28, size * 0.17, fur, angle=rng.uniform(-0.3, 0.3))
    _fill_ellipse(img, cx + size * 0.25, cy - size * 0.12, size * 0.1, size * 0.09, fur)
    leg_w = max(3, int(size * 0.03))
    for i in range(4):
        lx = int(cx - size * 0.2 + i * size * 0.13)
        _fill_rect(img, lx, int(cy + size * 0.1), lx + leg_w, int(cy + size * 0.3), fur * 0.8)
    spot = fur * rng.uniform(0.3, 0.6)
    for _ in range(rng.integers(6, 12)):
        sx, sy = rng.uniform(0.2, 0.8, size=2) * size
        s = rng.uniform(0.02, 0.05) * size
        if rng.random() < 0.5:
            _fill_rect(img, int(sx - s), int(sy - s), int(sx + s), int(sy + s), spot)
        else:
            _fill_ellipse(img, sx, sy, s, s * rng.uniform(0.6, 1.4), spot)
    return img


def _flower(rng: np.random.Generator, size: int) -> np.ndarray:
    img = _canvas(size, rng.uniform([170, 190, 170], [230, 245, 230]))
    stem = rng.uniform([20, 90, 20], [60, 140, 60])
    cx, cy = size / 2 + rng.uniform(-10, 10), size * rng.uniform(0.38, 0.46)
    _fill_rect(img, int(cx - size * 0.015), int(cy), int(cx + size * 0.015), size, stem)
    petal = rng.uniform([170, 40, 60], [255, 160, 210])
    n_petals = int(rng.integers(6, 10))
    phase = rng.uniform(0, math.pi)
    pr = size * rng.uniform(0.16, 0.22)
    for i in range(n_petals):
        angle = phase + 2 * math.pi * i / n_petals
        px = cx + math.cos(angle) * pr
        py = cy + math.sin(angle) * pr
        _fill_ellipse(img, px, py, pr * 0.55, pr * 0.28, petal, angle=angle)
    _fill_ellipse(img, cx, cy, pr * 0.4, pr * 0.4, rng.uniform(170, 230, size=3))
    return img


_DEMO_STYLES = {
    "animal": _animal,
    "face": _face,
    "flower": _flower,
    "vehicle": _vehicle,
}


def _noise(rng: np.random.Generator, size: int) -> np.ndarray:
    base = rng.uniform(90, 170)
    gray = base + rng.integers(-2, 3, size=(size, size)).astype(np.float64)
    return np.repeat(gray[:, :, None], 3, axis=2)


def _stripes(rng: np.random.Generator, size: int, horizontal: bool) -> np.ndarray:
    band = int(rng.integers(6, 21))
    phase = int(rng.integers(0, band))
    lo = rng.uniform(20, 90)
    hi = lo + rng.uniform(80, 150)
    coord = np.arange(size) + phase
    levels = np.where((coord // band) % 2 == 0, lo, hi).astype(np.float64)
    gray = np.tile(levels[:, None], (1, size)) if horizontal else np.tile(levels[None, :], (size, 1))
    return np.repeat(gray[:, :, None], 3, axis=2)


def _checker(rng: np.random.Generator, size: int) -> np.ndarray:
    cell = int(rng.integers(10, 28))
    lo = rng.uniform(20, 90)
    hi = lo + rng.uniform(80, 150)
    yy, xx = np.mgrid[0:size, 0:size]
    gray = np.where(((xx // cell) + (yy // cell)) % 2 == 0, lo, hi).astype(np.float64)
    return np.repeat(gray[:, :, None], 3, axis=2)


_PATTERN_STYLES = {
    "checker": _checker,
    "hstripes": lambda rng, size: _stripes(rng, size, horizontal=True),
    "noise": _noise,
    "vstripes": lambda rng, size: _stripes(rng, size, horizontal=False),
}


def _write_corpus(root, styles, per_category, size, seed, texture_noise) -> list[Path]:
    root = Path(root)
    rng = np.random.default_rng(seed)
    written = []
    for category in sorted(styles):
        directory = root / category
        directory.mkdir(parents=True, exist_ok=True)
        for i in range(per_category):
            arr = styles[category](rng, size)
            if texture_noise:
                # per-image texture keeps identically-shaped parts from
                # producing byte-identical corner patches across images,
                # while staying below the edge-detection threshold
                arr = arr + rng.integers(
                    -texture_noise, texture_noise + 1, size=arr.shape
                )
            arr = np.clip(arr, 0, 255).astype(np.uint8)
            path = directory / f"{category}_{i:02d}.png"
            Image.fromarray(arr, "RGB").save(path)
            written.append(path)
    return written


def make_demo_corpus(root: str | Path, per_category: int = 8, size: int = 256, seed: int = 7) -> list[Path]:
    """Write the demo corpus tree and return the created file paths."""
    return _write_corpus(root, _DEMO_STYLES, per_category, size, seed, texture_noise=2)


def make_pattern_corpus(root: str | Path, per_category: int = 10, size: int = 256, seed: int = 11) -> list[Path]:
    """Write the edge-pattern corpus tree (checker / hstripes / noise /
    vstripes) and return the created file paths."""
    return _write_corpus(root, _PATTERN_STYLES, per_category, size, seed, texture_noise=0)


def _main() -> None:
    import argparse

    parser = argparse.ArgumentParser(description="generate a synthetic image corpus")
    parser.add_argument("outdir")
    parser.add_argument("--kind", choices=("demo", "patterns"), default="demo")
    parser.add_argument("--per-category", type=int, default=8)
    parser.add_argument("--size", type=int, default=256)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    make = make_demo_corpus if args.kind == "demo" else make_pattern_corpus
    files = make(args.outdir, per_category=args.per_category, size=args.size, seed=args.seed)
    print(f"wrote {len(files)} images under {args.outdir}")


if __name__ == "__main__":
    _main()
