"""Symmetric InfoNCE loss over paired unit embeddings.

Given L matched (text, image) embedding rows U and V, logits are
M = exp(log_scale) * U @ V^T. The loss averages cross-entropy of the
diagonal under row softmax (text-to-image) plus under column softmax
(image-to-text). Gradients are closed-form:

    P = row softmax of M,  Q = column softmax of M
    G = (P + Q - 2 I) / L
    dU = tau * G @ V,  dV = tau * G^T @ U,  d(log_scale) = sum(G * M)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_f64, check_finite, log_softmax_rows, similarity_logits, softmax_rows


@dataclass(frozen=True)
class LossBreakdown:
    """Both direction terms of the symmetric contrastive loss."""

    text_to_image: float
    image_to_text: float

    @property
    def total(self) -> float:
        return self.text_to_image + self.image_to_text


@dataclass(frozen=True)
class LossGradients:
    """Gradients with respect to embeddings and the log scale."""

    d_text: np.ndarray
    d_image: np.ndarray
    d_log_scale: float


def _direction_terms(logits: np.ndarray) -> LossBreakdown:
    n = logits.shape[0]
    diag = np.arange(n)
    t2i = -float(log_softmax_rows(logits)[diag, diag].sum()) / n
    i2t = -float(log_softmax_rows(logits.T)[diag, diag].sum()) / n
    return LossBreakdown(text_to_image=t2i, image_to_text=i2t)


def contrastive_loss(text_emb: np.ndarray, image_emb: np.ndarray, tau: float) -> LossBreakdown:
    """Loss only; row i of each matrix is the i-th matched pair."""
    return _direction_terms(similarity_logits(as_f64(text_emb), as_f64(image_emb), tau))


def loss_and_grad(
    text_emb: np.ndarray, image_emb: np.ndarray, log_scale: float
) -> tuple[LossBreakdown, LossGradients]:
    """Loss plus analytic gradients (w.r.t. the normalized embeddings)."""
    u = as_f64(text_emb)
    v = as_f64(image_emb)
    tau = float(np.exp(log_scale))
    logits = similarity_logits(u, v, tau)
    breakdown = _direction_terms(logits)

    n = logits.shape[0]
    p = softmax_rows(logits)
    q = softmax_rows(logits.T).T
    g = p + q
    diag = np.arange(n)
    g[diag, diag] -= 2.0
    g /= n

    grads = LossGradients(
        d_text=tau * (g @ v),
        d_image=tau * (g.T @ u),
        d_log_scale=float((g * logits).sum()),
    )
    check_finite(grads.d_text, "d_text")
    check_finite(grads.d_image, "d_image")
    return breakdown, grads


def contrastive_grad(text_emb: np.ndarray, image_emb: np.ndarray, log_scale: float) -> LossGradients:
    return loss_and_grad(text_emb, image_emb, log_scale)[1]
