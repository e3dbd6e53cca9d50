"""8-bit image primitives: shortest-edge resize, center crop, grayscale
inversion, and a minimal binary PGM/PPM reader-writer for raw-pixel
manifests. Decoding of compressed formats (JPEG/PNG) is deliberately out
of scope here and lives in the export bridge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CropTooLargeError,
    DataError,
    InvalidTargetError,
    NotGrayscaleError,
    ParseError,
)


@dataclass(frozen=True)
class PixelImage:
    """Row-major uint8 pixels with shape (height, width, channels)."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        p = self.pixels
        if p.ndim != 3 or p.shape[2] not in (1, 3):
            raise DataError(f"pixels must be (H, W, 1|3), got {p.shape}")
        if p.dtype != np.uint8:
            raise DataError(f"pixels must be uint8, got {p.dtype}")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise DataError("image must have positive height and width")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @classmethod
    def from_array(cls, arr) -> "PixelImage":
        a = np.asarray(arr, dtype=np.uint8)
        if a.ndim == 2:
            a = a[:, :, None]
        return cls(pixels=a)


def _round_half_up(x: np.ndarray) -> np.ndarray:
    return np.floor(x + 0.5)


def resize_shortest_edge(img: PixelImage, target: int) -> PixelImage:
    """Scale so the shortest edge equals target, bilinear over pixel centers.

    The longer edge scales by the same factor, rounded to nearest with a
    minimum of 1.
    """
    if target < 1:
        raise InvalidTargetError(f"resize target must be >= 1, got {target}")
    h, w = img.height, img.width
    factor = target / min(h, w)
    if h <= w:
        new_h, new_w = target, max(1, int(np.floor(w * factor + 0.5)))
    else:
        new_h, new_w = max(1, int(np.floor(h * factor + 0.5))), target

    src = img.pixels.astype(np.float64)
    ys = (np.arange(new_h) + 0.5) * (h / new_h) - 0.5
    xs = (np.arange(new_w) + 0.5) * (w / new_w) - 0.5
    ys = np.clip(ys, 0.0, h - 1.0)
    xs = np.clip(xs, 0.0, w - 1.0)
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    wy = (ys - y0)[:, None, None]
    wx = (xs - x0)[None, :, None]

    top = src[y0][:, x0] * (1 - wx) + src[y0][:, x1] * wx
    bottom = src[y1][:, x0] * (1 - wx) + src[y1][:, x1] * wx
    resized = top * (1 - wy) + bottom * wy
    out = np.clip(_round_half_up(resized), 0, 255).astype(np.uint8)
    return PixelImage(pixels=out)


def center_crop(img: PixelImage, h: int, w: int) -> PixelImage:
    """Crop a centered (h, w) window; top-left at floor((H-h)/2), floor((W-w)/2)."""
    if h < 1 or w < 1:
        raise CropTooLargeError("crop size must be positive")
    if h > img.height or w > img.width:
        raise CropTooLargeError(
            f"crop {h}x{w} exceeds image {img.height}x{img.width}"
        )
    top = (img.height - h) // 2
    left = (img.width - w) // 2
    return PixelImage(pixels=img.pixels[top : top + h, left : left + w].copy())


def invert_grayscale(img: PixelImage) -> PixelImage:
    """Map every pixel p to 255 - p; single-channel images only."""
    if img.channels != 1:
        raise NotGrayscaleError(f"expected 1 channel, got {img.channels}")
    return PixelImage(pixels=(255 - img.pixels))


# netpbm I/O ---------------------------------------------------------------


def read_netpbm(path) -> PixelImage:
    """Read a binary PGM (P5) or PPM (P6) file with maxval 255."""
    with open(path, "rb") as fh:
        data = fh.read()

    pos = 0

    def next_token() -> bytes:
        nonlocal pos
        while pos < len(data):
            if data[pos : pos + 1].isspace():
                pos += 1
            elif data[pos : pos + 1] == b"#":
                while pos < len(data) and data[pos : pos + 1] != b"\n":
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ParseError(f"{path}: truncated header")
        return data[start:pos]

    magic = next_token()
    if magic not in (b"P5", b"P6"):
        raise ParseError(f"{path}: unsupported netpbm magic {magic!r}")
    width = int(next_token())
    height = int(next_token())
    maxval = int(next_token())
    if maxval != 255:
        raise ParseError(f"{path}: only maxval 255 supported, got {maxval}")
    pos += 1  # single whitespace byte after maxval
    channels = 1 if magic == b"P5" else 3
    expected = width * height * channels
    raw = data[pos : pos + expected]
    if len(raw) != expected:
        raise ParseError(f"{path}: expected {expected} pixel bytes, got {len(raw)}")
    arr = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, channels)
    return PixelImage(pixels=arr.copy())


def write_netpbm(path, img: PixelImage) -> None:
    """Write a binary PGM (1ch) or PPM (3ch) file with maxval 255."""
    magic = b"P5" if img.channels == 1 else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, img.width, img.height)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(img.pixels.tobytes())
