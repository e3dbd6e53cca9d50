"""Batch export of real-model embeddings into the interchange format."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, ManifestError
from .manifest import load_manifest
from .model import LoadedModel, load_checkpoint
from .ofce import write_embeddings
from .preprocess import load_image, prepare_image
from .prompts import FASHION_PROMPTS, FIXED_PROMPT_INDEX, render_prompt

MODALITIES = ("image", "text")
PROMPT_MODES = ("fixed", "template")


@dataclass
class ExportJob:
    checkpoint: str
    manifest: Path
    out: Path
    modality: str
    prompt_mode: str = "fixed"
    batch_size: int = 32
    invert_grayscale: bool = False
    device: str = "cpu"

    def __post_init__(self) -> None:
        if self.modality not in MODALITIES:
            raise ConfigError(f"modality must be one of {MODALITIES}, got {self.modality!r}")
        if self.prompt_mode not in PROMPT_MODES:
            raise ConfigError(
                f"prompt mode must be one of {PROMPT_MODES}, got {self.prompt_mode!r}"
            )
        if self.batch_size < 1:
            raise ConfigError(f"batch size must be positive, got {self.batch_size}")


@dataclass
class ExportSummary:
    count: int
    dim: int
    checksum: str
    resolution: int | None  # input pixels per side; None for text exports


def _image_vectors(job: ExportJob, records, loaded: LoadedModel) -> np.ndarray:
    inputs = []
    for rec in records:
        if rec.image_path is None:
            raise ManifestError(f"record {rec.id!r} has no image_path for an image export")
        img = load_image(rec.image_path, rec.id)
        inputs.append(
            prepare_image(
                img,
                loaded.resolution,
                rec.id,
                invert=job.invert_grayscale,
                mean=loaded.mean,
                std=loaded.std,
            )
        )
    return loaded.embed_images(inputs, job.batch_size)


def _text_vectors(job: ExportJob, records, loaded: LoadedModel) -> np.ndarray:
    captions = []
    for rec in records:
        if rec.caption is None:
            raise ManifestError(f"record {rec.id!r} has no caption for a text export")
        captions.append(rec.caption)
    if job.prompt_mode == "fixed":
        texts = [render_prompt(FIXED_PROMPT_INDEX, c) for c in captions]
        return loaded.embed_texts(texts, job.batch_size)
    # Template mode: average the unit embeddings of every prompt variant
    # per caption, then re-normalize the mean.
    n_prompts = len(FASHION_PROMPTS)
    texts = [render_prompt(i, c) for c in captions for i in range(n_prompts)]
    flat = loaded.embed_texts(texts, job.batch_size)
    stacked = flat.reshape(len(captions), n_prompts, -1)
    means = stacked.mean(axis=1)
    return means / np.linalg.norm(means, axis=1, keepdims=True)


def export_embeddings(job: ExportJob) -> ExportSummary:
    records = load_manifest(job.manifest)
    loaded = load_checkpoint(job.checkpoint, device=job.device)
    if job.modality == "image":
        vectors = _image_vectors(job, records, loaded)
    else:
        vectors = _text_vectors(job, records, loaded)
    if vectors.shape[0] == 0:
        vectors = np.empty((0, loaded.dim))
    write_embeddings(job.out, [r.id for r in records], vectors)
    digest = hashlib.sha256(Path(job.out).read_bytes()).hexdigest()
    return ExportSummary(
        count=len(records),
        dim=loaded.dim,
        checksum=digest,
        resolution=loaded.resolution if job.modality == "image" else None,
    )
