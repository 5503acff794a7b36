"""Grayscale image primitives: binary PGM I/O, median filtering, gradient fields."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit grayscale image stored as a read-only (height, width) float array.

    Gradient computation needs interior pixels, so images smaller than
    3x3 are rejected.
    """

    pixels: np.ndarray

    def __post_init__(self):
        px = np.array(self.pixels, dtype=np.float64)
        if px.ndim != 2:
            raise ValueError(f"expected a 2-D pixel array, got shape {px.shape}")
        h, w = px.shape
        if h < 3 or w < 3:
            raise ValueError(f"image must be at least 3x3 pixels, got {w}x{h}")
        if px.min() < 0.0 or px.max() > 255.0:
            raise ValueError("pixel intensities must lie in [0, 255]")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Return the next whitespace-delimited token, skipping '#' comments."""
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] != b"\n":
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise ValueError("unexpected end of PGM header")
    return data[start:pos], pos


def read_pgm(path) -> GrayImage:
    """Read a binary (P5) 8-bit PGM file.

    Only single-byte rasters (maxval <= 255) are supported; this is the
    pre-cropped face-region input format of the pipeline.
    """
    data = Path(path).read_bytes()
    magic, pos = _next_token(data, 0)
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM (expected magic 'P5', got {magic!r})")
    fields = []
    for _ in range(3):
        tok, pos = _next_token(data, pos)
        try:
            fields.append(int(tok))
        except ValueError:
            raise ValueError(f"{path}: malformed PGM header token {tok!r}") from None
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise ValueError(f"{path}: invalid PGM dimensions {width}x{height}")
    if not 0 < maxval <= 255:
        raise ValueError(f"{path}: only 8-bit PGM supported (maxval {maxval})")
    pos += 1  # single whitespace byte after maxval
    raster = data[pos : pos + width * height]
    if len(raster) < width * height:
        raise ValueError(f"{path}: truncated PGM raster")
    px = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return GrayImage(px)


def write_pgm(path, img: GrayImage) -> None:
    """Write a binary (P5) 8-bit PGM file."""
    px = np.clip(np.rint(img.pixels), 0, 255).astype(np.uint8)
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + px.tobytes())


def median_filter(img: GrayImage) -> GrayImage:
    """3x3 median filter with edge replication at the borders."""
    px = img.pixels
    h, w = px.shape
    padded = np.pad(px, 1, mode="edge")
    windows = np.stack(
        [padded[dy : dy + h, dx : dx + w] for dy in range(3) for dx in range(3)]
    )
    return GrayImage(np.median(windows, axis=0))


def compute_gradients(img: GrayImage) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference gradient magnitude and orientation per pixel.

    gx = (I(x+1, y) - I(x-1, y)) / 2 and gy = (I(x, y+1) - I(x, y-1)) / 2
    at interior pixels; border pixels get magnitude 0. Orientations are
    signed angles atan2(gy, gx) mapped into [0, 2*pi).

    Returns:
        (magnitudes, orientations), both shaped (height, width).
    """
    px = img.pixels
    gx = np.zeros_like(px)
    gy = np.zeros_like(px)
    gx[1:-1, 1:-1] = (px[1:-1, 2:] - px[1:-1, :-2]) / 2.0
    gy[1:-1, 1:-1] = (px[2:, 1:-1] - px[:-2, 1:-1]) / 2.0
    mag = np.hypot(gx, gy)
    ori = np.mod(np.arctan2(gy, gx), TWO_PI)
    # np.mod can round tiny negative angles up to exactly 2*pi
    ori[ori >= TWO_PI] = 0.0
    return mag, ori
