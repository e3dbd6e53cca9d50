"""Dual encoder: image head, text head, and the learnable logit scale.

The image head is a single linear projection of precomputed/raw features;
the text head mean-pools token embeddings then projects. Both outputs are
unit-normalized. Logits are scaled by exp(log_scale), initialized to
1/0.07 and capped at 100 during training.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, DimMismatchError, TokenOutOfRangeError
from .linalg import as_f64, l2_normalize_rows
from .rng import derive_seed, uniform_block

LOG_SCALE_INIT = math.log(1.0 / 0.07)
TAU_MAX = 100.0
LOG_TAU_MAX = math.log(TAU_MAX)

PARAM_ORDER = ("w_img", "b_img", "e_tok", "w_txt", "b_txt", "log_scale")


@dataclass
class DualEncoder:
    w_img: np.ndarray  # (feature_dim, embed_dim)
    b_img: np.ndarray  # (embed_dim,)
    e_tok: np.ndarray  # (vocab_size, token_dim)
    w_txt: np.ndarray  # (token_dim, embed_dim)
    b_txt: np.ndarray  # (embed_dim,)
    log_scale: np.ndarray  # scalar, shape ()

    @property
    def feature_dim(self) -> int:
        return self.w_img.shape[0]

    @property
    def embed_dim(self) -> int:
        return self.w_img.shape[1]

    @property
    def vocab_size(self) -> int:
        return self.e_tok.shape[0]

    @property
    def token_dim(self) -> int:
        return self.e_tok.shape[1]

    @property
    def tau(self) -> float:
        """Logit scale exp(log_scale), capped at TAU_MAX."""
        return min(float(np.exp(self.log_scale)), TAU_MAX)

    def params(self) -> dict[str, np.ndarray]:
        """Named parameter tensors in a fixed, stable order."""
        return {name: getattr(self, name) for name in PARAM_ORDER}

    @classmethod
    def from_params(cls, params: Mapping[str, np.ndarray]) -> "DualEncoder":
        missing = [n for n in PARAM_ORDER if n not in params]
        if missing:
            raise ConfigError(f"missing encoder parameters: {missing}")
        tensors = {n: as_f64(params[n]) for n in PARAM_ORDER}
        ls = tensors["log_scale"]
        tensors["log_scale"] = np.asarray(ls, dtype=np.float64).reshape(())
        enc = cls(**tensors)
        if enc.w_img.ndim != 2 or enc.e_tok.ndim != 2 or enc.w_txt.ndim != 2:
            raise DimMismatchError("weight matrices must be 2-D")
        if enc.b_img.shape != (enc.embed_dim,) or enc.b_txt.shape != (enc.embed_dim,):
            raise DimMismatchError("bias shapes do not match embed dim")
        if enc.w_txt.shape != (enc.token_dim, enc.embed_dim):
            raise DimMismatchError("text projection does not match token dim")
        return enc

    def encode_image_batch(self, features: np.ndarray) -> np.ndarray:
        """Project raw feature rows to unit-norm image embeddings."""
        feats = as_f64(features)
        if feats.ndim == 1:
            feats = feats[None, :]
        if feats.ndim != 2 or feats.shape[1] != self.feature_dim:
            raise DimMismatchError(
                f"expected features with {self.feature_dim} columns, got {feats.shape}"
            )
        return l2_normalize_rows(feats @ self.w_img + self.b_img)

    def encode_image(self, features: np.ndarray) -> np.ndarray:
        return self.encode_image_batch(features)[0]

    def pool_tokens(self, token_ids: Sequence[int]) -> np.ndarray:
        """Mean of the embedding rows for a token id sequence."""
        ids = np.asarray(token_ids, dtype=np.int64)
        if ids.ndim != 1 or ids.size == 0:
            raise TokenOutOfRangeError("token id sequence must be nonempty and flat")
        if ids.min() < 0 or ids.max() >= self.vocab_size:
            raise TokenOutOfRangeError(
                f"token id outside [0, {self.vocab_size}): {int(ids.min())}..{int(ids.max())}"
            )
        return self.e_tok[ids].sum(axis=0) / float(ids.size)

    def encode_text(self, token_ids: Sequence[int]) -> np.ndarray:
        pooled = self.pool_tokens(token_ids)
        return l2_normalize_rows((pooled @ self.w_txt + self.b_txt)[None, :])[0]

    def encode_text_batch(self, token_seqs: Sequence[Sequence[int]]) -> np.ndarray:
        pooled = np.stack([self.pool_tokens(ids) for ids in token_seqs])
        return l2_normalize_rows(pooled @ self.w_txt + self.b_txt)


def _uniform_matrix(seed: int, rows: int, cols: int, bound: float) -> np.ndarray:
    flat = uniform_block(seed, rows * cols)
    return ((flat * 2.0 - 1.0) * bound).reshape(rows, cols)


def init_encoder(
    feature_dim: int,
    embed_dim: int,
    vocab_size: int = 16384,
    token_dim: int = 16,
    seed: int = 0,
) -> DualEncoder:
    """Seeded Glorot-uniform initialization; biases start at zero."""
    for name, v in (
        ("feature_dim", feature_dim),
        ("embed_dim", embed_dim),
        ("vocab_size", vocab_size),
        ("token_dim", token_dim),
    ):
        if v <= 0:
            raise ConfigError(f"{name} must be positive, got {v}")
    seeds = [derive_seed(seed, k) for k in range(3)]
    w_img = _uniform_matrix(
        seeds[0], feature_dim, embed_dim, math.sqrt(6.0 / (feature_dim + embed_dim))
    )
    e_tok = _uniform_matrix(seeds[1], vocab_size, token_dim, math.sqrt(3.0 / token_dim))
    w_txt = _uniform_matrix(
        seeds[2], token_dim, embed_dim, math.sqrt(6.0 / (token_dim + embed_dim))
    )
    return DualEncoder(
        w_img=w_img,
        b_img=np.zeros(embed_dim),
        e_tok=e_tok,
        w_txt=w_txt,
        b_txt=np.zeros(embed_dim),
        log_scale=np.asarray(LOG_SCALE_INIT, dtype=np.float64).reshape(()),
    )
