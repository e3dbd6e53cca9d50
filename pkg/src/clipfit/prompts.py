"""Fashion prompt contexts: the fixed 19-entry template, per-pair random
selection during training, rendering, and class-embedding construction.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import (
    DataError,
    DuplicateLabelError,
    EmptyCaptionError,
    EmptyLabelSetError,
)
from .linalg import l2_normalize
from .rng import SplitMix64

# The shipped template. Order is fixed; index 0 doubles as the generic
# evaluation prompt and as the training prompt in "fixed" mode.
FASHION_PROMPTS: tuple[str, ...] = (
    "a photo of a",
    "a photo of a nice",
    "a photo of a cool",
    "a photo of an expensive",
    "a good photo of a",
    "a bright photo of a",
    "a fashion studio shot of a",
    "a fashion magazine photo of a",
    "a fashion brochure photo of a",
    "a fashion catalog photo of a",
    "a fashion press photo of a",
    "a zalando photo of a",
    "a yoox photo of a",
    "a yoox web image of a",
    "an asos photo of a",
    "a high resolution photo of a",
    "a cropped photo of a",
    "a close-up photo of a",
    "a photo of one",
)

FIXED_PROMPT_INDEX = 0


def load_template(path) -> tuple[str, ...]:
    """Read an override template: one prompt per line, blanks skipped."""
    with open(path, encoding="utf-8") as fh:
        prompts = tuple(line.strip() for line in fh if line.strip())
    if not prompts:
        raise DataError(f"template file {path} contains no prompts")
    return prompts


def sample_prompt(rng: SplitMix64, template: Sequence[str] = FASHION_PROMPTS) -> int:
    """Draw a uniform template index, advancing the stream."""
    return rng.next_below(len(template))


def render_prompt(
    template_idx: int, caption: str, template: Sequence[str] = FASHION_PROMPTS
) -> str:
    """Concatenate the chosen prompt and the caption with a single space."""
    if not caption:
        raise EmptyCaptionError("cannot render a prompt around an empty caption")
    return f"{template[template_idx]} {caption}"


def build_class_embeddings(
    labels: Sequence[str],
    embed_text: Callable[[str], np.ndarray],
    mode: str = "fixed",
    template: Sequence[str] = FASHION_PROMPTS,
) -> np.ndarray:
    """Embed class labels into a (k, d) matrix of unit-norm rows.

    mode "fixed" (evaluation default) wraps each label in the generic
    prompt; mode "template-ensemble" averages the unit embeddings of the
    label under every template prompt and re-normalizes.
    """
    if not labels:
        raise EmptyLabelSetError("label list is empty")
    seen = set()
    for label in labels:
        if label in seen:
            raise DuplicateLabelError(f"duplicate label {label!r}")
        seen.add(label)
    if mode not in ("fixed", "template-ensemble"):
        raise DataError(f"unknown class-embedding mode {mode!r}")

    rows = []
    for label in labels:
        if mode == "fixed":
            emb = embed_text(render_prompt(FIXED_PROMPT_INDEX, label, template))
        else:
            stack = [
                l2_normalize(embed_text(render_prompt(i, label, template)))
                for i in range(len(template))
            ]
            emb = np.mean(stack, axis=0)
        rows.append(l2_normalize(emb))
    return np.stack(rows)
