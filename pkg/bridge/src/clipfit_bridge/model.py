"""CLIP-family checkpoint loading and batched feature extraction.

Embeddings come from the text/vision towers plus their projection heads,
then are unit-normalized in float64 so downstream readers see norms well
inside tolerance. The checkpoint's native input resolution drives the
image pipeline and is surfaced to the export summary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .errors import CheckpointLoadError, DimMismatchError
from .preprocess import CLIP_MEAN, CLIP_STD


@dataclass
class LoadedModel:
    model: "torch.nn.Module"
    tokenizer: object
    resolution: int
    mean: tuple[float, ...]
    std: tuple[float, ...]
    max_text_len: int
    dim: int
    device: str

    def embed_texts(self, texts: list[str], batch_size: int) -> np.ndarray:
        rows = []
        for start in range(0, len(texts), batch_size):
            chunk = texts[start : start + batch_size]
            enc = self.tokenizer(
                chunk,
                padding=True,
                truncation=True,
                max_length=self.max_text_len,
                return_tensors="pt",
            )
            enc = {k: v.to(self.device) for k, v in enc.items() if torch.is_tensor(v)}
            with torch.no_grad():
                out = self.model.text_model(
                    input_ids=enc["input_ids"],
                    attention_mask=enc.get("attention_mask"),
                )
                feats = self.model.text_projection(out.pooler_output)
            rows.append(feats.float().cpu().numpy())
        return _normalize(np.vstack(rows) if rows else np.empty((0, self.dim)), self.dim)

    def embed_images(self, pixel_batches: list[np.ndarray], batch_size: int) -> np.ndarray:
        rows = []
        for start in range(0, len(pixel_batches), batch_size):
            chunk = np.stack(pixel_batches[start : start + batch_size])
            pixels = torch.from_numpy(chunk).to(self.device)
            with torch.no_grad():
                out = self.model.vision_model(pixel_values=pixels)
                feats = self.model.visual_projection(out.pooler_output)
            rows.append(feats.float().cpu().numpy())
        return _normalize(np.vstack(rows) if rows else np.empty((0, self.dim)), self.dim)


def _normalize(rows: np.ndarray, dim: int) -> np.ndarray:
    if rows.shape[1] != dim:
        raise DimMismatchError(f"model produced width {rows.shape[1]}, expected {dim}")
    rows = rows.astype(np.float64)
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise DimMismatchError("model produced a zero embedding")
    return rows / norms


def load_checkpoint(identifier: str, device: str = "cpu") -> LoadedModel:
    try:
        from transformers import AutoTokenizer, CLIPModel
        from transformers.utils import logging as hf_logging
    except ImportError as exc:  # pragma: no cover - transformers is a hard dep
        raise CheckpointLoadError(f"transformers unavailable: {exc}") from exc

    hf_logging.set_verbosity_error()
    hf_logging.disable_progress_bar()
    try:
        model = CLIPModel.from_pretrained(identifier)
        tokenizer = AutoTokenizer.from_pretrained(identifier)
    except Exception as exc:
        raise CheckpointLoadError(f"cannot load checkpoint {identifier!r}: {exc}") from exc
    model.eval()
    model.to(device)

    mean, std = CLIP_MEAN, CLIP_STD
    try:
        from transformers import AutoImageProcessor

        proc = AutoImageProcessor.from_pretrained(identifier)
        if getattr(proc, "image_mean", None) and getattr(proc, "image_std", None):
            mean = tuple(float(x) for x in proc.image_mean)
            std = tuple(float(x) for x in proc.image_std)
    except Exception:
        pass  # processor config optional; fall back to stock statistics

    return LoadedModel(
        model=model,
        tokenizer=tokenizer,
        resolution=int(model.config.vision_config.image_size),
        mean=mean,
        std=std,
        max_text_len=int(model.config.text_config.max_position_embeddings),
        dim=int(model.config.projection_dim),
        device=device,
    )
