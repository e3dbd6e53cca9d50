"""Fashion prompt contexts, matching the engine's shipped template so both
sides of the interchange render identical strings."""

from __future__ import annotations

from .errors import DataError

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


def render_prompt(index: int, text: str) -> str:
    if not text:
        raise DataError("cannot render a prompt around empty text")
    return f"{FASHION_PROMPTS[index]} {text}"
