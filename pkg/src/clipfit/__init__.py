"""clipfit: a desk-scale contrastive image-text engine.

Trains a dual encoder (linear image head, mean-pooled token text head,
learnable logit scale) with a symmetric InfoNCE objective over
multi-source stratified batches, evaluates zero-shot classification,
attribute recognition, and cross-modal retrieval, and round-trips
embeddings and checkpoints through compact binary formats.
"""

from .encoder import LOG_SCALE_INIT, TAU_MAX, DualEncoder, init_encoder
from .errors import ConfigError, DataError, EngineError, NumericError
from .loss import LossBreakdown, LossGradients, contrastive_loss, loss_and_grad
from .manifest import DatasetManifest, ImageTextPair, load_manifest, load_registry
from .metrics import (
    AttributeResult,
    RetrievalResult,
    ZeroShotResult,
    attribute_recall,
    retrieval_recall,
    weighted_f1,
    zero_shot_classify,
)
from .optim import AdamWState, TrainConfig, adamw_step
from .prompts import FASHION_PROMPTS, build_class_embeddings
from .sampler import Batch, apportion, batch_stream
from .textprep import extract_noun_chunks, preprocess_caption
from .tokenizer import Tokenizer
from .train import TrainResult, fit, train_step

__version__ = "0.1.0"

__all__ = [
    "AdamWState",
    "AttributeResult",
    "Batch",
    "ConfigError",
    "DataError",
    "DatasetManifest",
    "DualEncoder",
    "EngineError",
    "FASHION_PROMPTS",
    "ImageTextPair",
    "LOG_SCALE_INIT",
    "LossBreakdown",
    "LossGradients",
    "NumericError",
    "RetrievalResult",
    "TAU_MAX",
    "Tokenizer",
    "TrainConfig",
    "TrainResult",
    "ZeroShotResult",
    "adamw_step",
    "apportion",
    "attribute_recall",
    "batch_stream",
    "build_class_embeddings",
    "contrastive_loss",
    "extract_noun_chunks",
    "fit",
    "init_encoder",
    "load_manifest",
    "load_registry",
    "loss_and_grad",
    "preprocess_caption",
    "retrieval_recall",
    "train_step",
    "weighted_f1",
    "zero_shot_classify",
    "__version__",
]
