"""Caption preprocessing: rule-based lemmatization and noun-chunk extraction.

Tagging runs over a bundled closed-class lexicon (determiners,
prepositions, conjunctions, a curated fashion adjective list); any word
not in the lexicon counts as a noun, which suits terse catalog captions.
A chunk is a maximal adjective/noun run ending in a noun; determiners are
dropped, prepositions and other closed-class words split runs, and the
head noun of each chunk is lemmatized.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import DataError, EmptyCaptionError

# Invariable garment plurals plus -ses words the suffix rules would
# otherwise mangle ("blouses" -> "blous").
_LEMMA_EXCEPTIONS = {
    "jeans": "jeans",
    "pants": "pants",
    "shorts": "shorts",
    "leggings": "leggings",
    "tights": "tights",
    "trousers": "trousers",
    "clothes": "clothes",
    "glasses": "glasses",
    "sunglasses": "sunglasses",
    "blouses": "blouse",
    "purses": "purse",
}


def lemmatize_token(token: str) -> str:
    """Singularize a lowercase alphabetic token with fixed suffix rules.

    Non-alphabetic tokens are returned unchanged.
    """
    if not token.isalpha():
        return token
    hit = _LEMMA_EXCEPTIONS.get(token)
    if hit is not None:
        return hit
    if len(token) > 4 and token.endswith("ies"):
        return token[:-3] + "y"
    if len(token) > 4 and token.endswith("ses"):
        return token[:-2]
    if len(token) > 2 and token.endswith("s") and not token.endswith("ss"):
        return token[:-1]
    return token


@dataclass(frozen=True)
class PosLexicon:
    determiners: frozenset[str]
    prepositions: frozenset[str]
    conjunctions: frozenset[str]
    other_closed: frozenset[str]
    adjectives: frozenset[str]

    @classmethod
    def from_dict(cls, raw: dict) -> "PosLexicon":
        try:
            return cls(
                determiners=frozenset(raw["determiners"]),
                prepositions=frozenset(raw["prepositions"]),
                conjunctions=frozenset(raw["conjunctions"]),
                other_closed=frozenset(raw.get("other_closed", ())),
                adjectives=frozenset(raw["adjectives"]),
            )
        except KeyError as exc:
            raise DataError(f"lexicon is missing category {exc}") from exc

    @classmethod
    def load(cls, path) -> "PosLexicon":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def breaks_run(self, token: str) -> bool:
        return (
            token in self.prepositions
            or token in self.conjunctions
            or token in self.other_closed
        )


@lru_cache(maxsize=1)
def default_lexicon() -> PosLexicon:
    raw = resources.files("clipfit.data").joinpath("pos_lexicon.json").read_text("utf-8")
    return PosLexicon.from_dict(json.loads(raw))


# Words keep internal hyphens/apostrophes; all other punctuation splits
# runs the same way a preposition does.
_WORD_RE = re.compile(r"\w+(?:[-']\w+)*")
_BREAK = None


def _tokens_with_breaks(caption: str) -> list[str | None]:
    lowered = caption.lower()
    out: list[str | None] = []
    last_end = 0
    for match in _WORD_RE.finditer(lowered):
        gap = lowered[last_end : match.start()]
        if out and gap.strip():
            out.append(_BREAK)
        out.append(match.group())
        last_end = match.end()
    return out


def extract_noun_chunks(caption: str, lexicon: PosLexicon | None = None) -> list[str]:
    """Extract adjective/noun chunks from a caption, in original order."""
    if not caption or not caption.strip():
        raise EmptyCaptionError("caption is empty")
    lex = lexicon if lexicon is not None else default_lexicon()

    chunks: list[str] = []
    run: list[tuple[str, bool]] = []  # (token, is_noun)

    def flush() -> None:
        nonlocal run
        while run and not run[-1][1]:
            run.pop()  # a chunk must end in a noun
        if run:
            words = [tok for tok, _ in run]
            words[-1] = lemmatize_token(words[-1])
            chunks.append(" ".join(words))
        run = []

    for token in _tokens_with_breaks(caption):
        if token is _BREAK:
            flush()
            continue
        if token in lex.determiners:
            continue
        if lex.breaks_run(token):
            flush()
            continue
        run.append((token, token not in lex.adjectives))
    flush()
    return chunks


def preprocess_caption(
    caption: str, lexicon: PosLexicon | None = None, joiner: str = ", "
) -> str:
    """Rewrite a caption as its concatenated noun chunks.

    Falls back to the lowercased original when no chunk is found, so a
    record never ends up with an empty caption.
    """
    chunks = extract_noun_chunks(caption, lexicon)
    if not chunks:
        return caption.strip().lower()
    return joiner.join(chunks)
