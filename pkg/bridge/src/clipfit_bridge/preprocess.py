"""Deterministic image preparation: shortest-edge resize, center crop,
optional grayscale inversion, and channel normalization to model inputs.
"""

from __future__ import annotations

import numpy as np
from PIL import Image

from .errors import ImageDecodeError

# Channel statistics used by the original CLIP-family preprocessing.
CLIP_MEAN = (0.48145466, 0.4578275, 0.40821073)
CLIP_STD = (0.26862954, 0.26130258, 0.27577711)


def load_image(path, record_id: str) -> Image.Image:
    try:
        with Image.open(path) as img:
            img.load()
            return img.copy()
    except (OSError, ValueError) as exc:
        raise ImageDecodeError(f"record {record_id!r}: cannot decode {path}: {exc}") from exc


def invert_grayscale(img: Image.Image, record_id: str) -> Image.Image:
    """Map pixel p to 255 - p; only defined for single-channel images."""
    if img.mode != "L":
        raise ImageDecodeError(
            f"record {record_id!r}: inversion needs a grayscale image, got mode {img.mode}"
        )
    return Image.fromarray(255 - np.asarray(img, dtype=np.uint8))


def resize_shortest_edge(img: Image.Image, target: int) -> Image.Image:
    """Scale so the shorter side equals target, preserving aspect ratio."""
    w, h = img.size
    if w <= h:
        new_w = target
        new_h = int(target * h / w + 0.5)
    else:
        new_h = target
        new_w = int(target * w / h + 0.5)
    return img.resize((new_w, new_h), Image.Resampling.BICUBIC)


def center_crop(img: Image.Image, size: int) -> Image.Image:
    w, h = img.size
    if w < size or h < size:
        raise ImageDecodeError(f"image {w}x{h} smaller than crop size {size}")
    left = (w - size) // 2
    top = (h - size) // 2
    return img.crop((left, top, left + size, top + size))


def prepare_image(
    img: Image.Image,
    size: int,
    record_id: str,
    invert: bool = False,
    mean=CLIP_MEAN,
    std=CLIP_STD,
) -> np.ndarray:
    """Full pipeline to a (3, size, size) float32 tensor input."""
    if invert:
        img = invert_grayscale(img, record_id)
    img = img.convert("RGB")
    img = resize_shortest_edge(img, size)
    img = center_crop(img, size)
    arr = np.asarray(img, dtype=np.float32) / 255.0
    arr = (arr - np.asarray(mean, dtype=np.float32)) / np.asarray(std, dtype=np.float32)
    return arr.transpose(2, 0, 1)
