"""End-to-end training: batch assembly, forward/backward, fitting.

The backward pass is hand-derived. Upstream gradients from the
contrastive loss flow through row normalization, the two linear heads,
and mean pooling back to the token embedding rows that each caption
touched.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .encoder import DualEncoder
from .errors import DataError
from .linalg import l2_normalize_rows_with_norms, normalize_rows_backward
from .loss import LossBreakdown, loss_and_grad
from .manifest import DatasetManifest, ImageTextPair, load_features
from .optim import AdamWState, TrainConfig, adamw_step
from .prompts import FIXED_PROMPT_INDEX, FASHION_PROMPTS, render_prompt, sample_prompt
from .rng import SplitMix64, derive_seed
from .sampler import Batch, batch_stream
from .textprep import preprocess_caption
from .tokenizer import Tokenizer

PROMPT_STREAM_SALT = 0x70726F6D7074  # ascii "prompt"


def caption_text(pair: ImageTextPair, preprocess: str) -> str:
    """Caption as fed to the prompt: noun chunks or the raw string."""
    if preprocess == "chunks":
        return preprocess_caption(pair.caption)
    return pair.caption


@dataclass
class EncodedBatch:
    """A batch after caption rendering, tokenization, and feature load."""

    token_seqs: list[list[int]]
    features: np.ndarray  # (batch, feature_dim)
    prompt_indices: list[int]
    pair_ids: list[str]


@dataclass
class DatasetCache:
    """Memoized per-record caption text and feature vectors."""

    preprocess_by_source: dict[str, str]
    captions: dict[tuple[str, str], str] = field(default_factory=dict)
    features: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)

    @classmethod
    def for_manifests(cls, manifests: Sequence[DatasetManifest]) -> "DatasetCache":
        return cls(preprocess_by_source={m.source_id: m.preprocess for m in manifests})

    def caption(self, pair: ImageTextPair) -> str:
        key = (pair.source_id, pair.id)
        if key not in self.captions:
            mode = self.preprocess_by_source.get(pair.source_id, "chunks")
            self.captions[key] = caption_text(pair, mode)
        return self.captions[key]

    def feature_vector(self, pair: ImageTextPair) -> np.ndarray:
        key = (pair.source_id, pair.id)
        if key not in self.features:
            self.features[key] = load_features(pair)
        return self.features[key]


def prepare_batch(
    batch: Batch,
    tokenizer: Tokenizer,
    cache: DatasetCache,
    prompt_mode: str,
    prompt_rng: SplitMix64 | None = None,
    template: Sequence[str] = FASHION_PROMPTS,
) -> EncodedBatch:
    """Render prompts, tokenize, and stack features for one batch."""
    token_seqs: list[list[int]] = []
    prompt_indices: list[int] = []
    rows: list[np.ndarray] = []
    for pair in batch.pairs:
        if prompt_mode == "template":
            if prompt_rng is None:
                raise DataError("template prompt mode needs a prompt rng")
            idx = sample_prompt(prompt_rng, template)
        else:
            idx = FIXED_PROMPT_INDEX
        text = render_prompt(idx, cache.caption(pair), template)
        token_seqs.append(tokenizer.encode(text))
        prompt_indices.append(idx)
        rows.append(cache.feature_vector(pair))
    features = np.stack(rows)
    return EncodedBatch(
        token_seqs=token_seqs,
        features=features,
        prompt_indices=prompt_indices,
        pair_ids=[p.id for p in batch.pairs],
    )


def train_step(
    encoder: DualEncoder, enc_batch: EncodedBatch
) -> tuple[LossBreakdown, dict[str, np.ndarray]]:
    """One forward/backward pass; returns loss and parameter gradients."""
    feats = enc_batch.features.astype(np.float64, copy=False)

    z_img = feats @ encoder.w_img + encoder.b_img
    v_emb, img_norms = l2_normalize_rows_with_norms(z_img)

    pooled = np.stack([encoder.pool_tokens(ids) for ids in enc_batch.token_seqs])
    z_txt = pooled @ encoder.w_txt + encoder.b_txt
    u_emb, txt_norms = l2_normalize_rows_with_norms(z_txt)

    breakdown, grads = loss_and_grad(u_emb, v_emb, float(encoder.log_scale))

    dz_img = normalize_rows_backward(v_emb, grads.d_image, img_norms)
    dz_txt = normalize_rows_backward(u_emb, grads.d_text, txt_norms)

    d_pooled = dz_txt @ encoder.w_txt.T
    d_e_tok = np.zeros_like(encoder.e_tok)
    for row, ids in enumerate(enc_batch.token_seqs):
        ids_arr = np.asarray(ids, dtype=np.int64)
        np.add.at(d_e_tok, ids_arr, d_pooled[row] / float(len(ids)))

    param_grads = {
        "w_img": feats.T @ dz_img,
        "b_img": dz_img.sum(axis=0),
        "e_tok": d_e_tok,
        "w_txt": pooled.T @ dz_txt,
        "b_txt": dz_txt.sum(axis=0),
        "log_scale": np.asarray(grads.d_log_scale, dtype=np.float64).reshape(()),
    }
    return breakdown, param_grads


@dataclass(frozen=True)
class StepStats:
    step: int
    epoch: int
    loss: float
    text_to_image: float
    image_to_text: float
    tau: float
    batch_size: int


@dataclass
class TrainResult:
    encoder: DualEncoder
    history: list[StepStats]
    optimizer: AdamWState

    @property
    def steps(self) -> int:
        return len(self.history)


def fit(
    manifests: Sequence[DatasetManifest],
    encoder: DualEncoder,
    config: TrainConfig,
    tokenizer: Tokenizer | None = None,
    template: Sequence[str] = FASHION_PROMPTS,
    lr_schedule: Callable[[int], float] | None = None,
    callback: Callable[[StepStats], None] | None = None,
) -> TrainResult:
    """Train in place over stratified batches; returns the encoder and log."""
    tokenizer = tokenizer if tokenizer is not None else Tokenizer(vocab_size=encoder.vocab_size)
    cache = DatasetCache.for_manifests(manifests)
    prompt_rng = SplitMix64(derive_seed(config.seed, PROMPT_STREAM_SALT))
    params = encoder.params()
    state = AdamWState.for_params(params)
    history: list[StepStats] = []

    stream = batch_stream(manifests, config.batch_size, config.seed, config.epochs)
    for batch in stream:
        enc_batch = prepare_batch(
            batch, tokenizer, cache, config.prompt_mode, prompt_rng, template
        )
        breakdown, grads = train_step(encoder, enc_batch)
        step_config = (
            replace(config, learning_rate=lr_schedule(batch.step))
            if lr_schedule is not None
            else config
        )
        adamw_step(params, grads, state, step_config)
        stats = StepStats(
            step=batch.step,
            epoch=batch.epoch,
            loss=breakdown.total,
            text_to_image=breakdown.text_to_image,
            image_to_text=breakdown.image_to_text,
            tau=encoder.tau,
            batch_size=len(batch),
        )
        history.append(stats)
        if callback is not None:
            callback(stats)
        if config.max_steps is not None and len(history) >= config.max_steps:
            break
    if not history:
        raise DataError("training produced no batches")
    return TrainResult(encoder=encoder, history=history, optimizer=state)


def encode_pairs(
    encoder: DualEncoder,
    pairs: Sequence[ImageTextPair],
    cache: DatasetCache,
    tokenizer: Tokenizer,
    prompt_index: int = FIXED_PROMPT_INDEX,
    template: Sequence[str] = FASHION_PROMPTS,
) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic (text, image) embeddings for an evaluation set."""
    feats = np.stack([cache.feature_vector(p) for p in pairs])
    token_seqs = [
        tokenizer.encode(render_prompt(prompt_index, cache.caption(p), template))
        for p in pairs
    ]
    return encoder.encode_text_batch(token_seqs), encoder.encode_image_batch(feats)
