"""Decoupled-weight-decay Adam, written out explicitly.

Per step t (1-based) for each tensor p with gradient g:

    m = b1*m + (1-b1)*g          mhat = m / (1 - b1**t)
    v = b2*v + (1-b2)*g*g        vhat = v / (1 - b2**t)
    p -= lr * mhat / (sqrt(vhat) + eps)
    p *= 1 - lr * wd             (decay after the Adam update)

The logit scale never receives weight decay and is clamped after each
step so exp(log_scale) stays at or below TAU_MAX.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .encoder import LOG_TAU_MAX
from .errors import ConfigError

NO_DECAY = ("log_scale",)

PROMPT_MODES = ("fixed", "template")


@dataclass
class TrainConfig:
    """Optimization hyperparameters; defaults follow the full-scale recipe."""

    learning_rate: float = 5e-7
    beta1: float = 0.9
    beta2: float = 0.98
    eps: float = 1e-6
    weight_decay: float = 0.2
    epochs: int = 60
    batch_size: int = 2048
    seed: int = 0
    prompt_mode: str = "template"
    max_steps: int | None = None

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        for name in ("beta1", "beta2"):
            b = getattr(self, name)
            if not 0.0 <= b < 1.0:
                raise ConfigError(f"{name} must be in [0, 1), got {b}")
        if self.eps <= 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")
        if self.weight_decay < 0:
            raise ConfigError(f"weight_decay must be nonnegative, got {self.weight_decay}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be at least 1, got {self.epochs}")
        if self.batch_size < 2:
            raise ConfigError(f"batch_size must be at least 2, got {self.batch_size}")
        if self.prompt_mode not in PROMPT_MODES:
            raise ConfigError(f"prompt_mode must be one of {PROMPT_MODES}, got {self.prompt_mode!r}")
        if self.max_steps is not None and self.max_steps < 1:
            raise ConfigError(f"max_steps must be at least 1, got {self.max_steps}")

    @classmethod
    def toy(cls, **overrides) -> "TrainConfig":
        """Small-problem defaults: bigger learning rate, small batches."""
        values = {"learning_rate": 1e-3, "batch_size": 64, "epochs": 100}
        values.update(overrides)
        return cls(**values)


@dataclass
class AdamWState:
    """First/second moment accumulators plus the shared step counter."""

    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def for_params(cls, params: Mapping[str, np.ndarray]) -> "AdamWState":
        return cls(
            step=0,
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
        )


def adamw_step(
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: AdamWState,
    config: TrainConfig,
) -> None:
    """Update every tensor in place; missing gradients mean zero."""
    state.step += 1
    t = state.step
    bc1 = 1.0 - config.beta1**t
    bc2 = 1.0 - config.beta2**t
    decay = 1.0 - config.learning_rate * config.weight_decay
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(p)
        g = np.asarray(g, dtype=np.float64)
        m = state.m[name]
        v = state.v[name]
        m *= config.beta1
        m += (1.0 - config.beta1) * g
        v *= config.beta2
        v += (1.0 - config.beta2) * (g * g)
        p -= config.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + config.eps)
        if name not in NO_DECAY and config.weight_decay > 0.0:
            p *= decay
    if "log_scale" in params:
        np.minimum(params["log_scale"], LOG_TAU_MAX, out=params["log_scale"])
