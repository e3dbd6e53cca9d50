"""Hash-vocabulary tokenizer: deterministic, dependency-free token ids.

Words map into [2, vocab_size) through 64-bit FNV-1a over their UTF-8
bytes; id 0 is BOS, id 1 is EOS. Collisions are tolerated by design; at
desk scale they are rare and harmless to the contrastive objective.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ConfigError, EmptyTextError

BOS_ID = 0
EOS_ID = 1

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1

_WORD_RE = re.compile(r"\w+")


def fnv1a_64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class Tokenizer:
    vocab_size: int = 16384
    max_len: int = 77

    def __post_init__(self) -> None:
        if self.vocab_size <= 2:
            raise ConfigError("vocab_size must exceed the two reserved ids")
        if self.max_len < 3:
            raise ConfigError("max_len must fit BOS, one token, and EOS")

    def token_id(self, word: str) -> int:
        return 2 + fnv1a_64(word.encode("utf-8")) % (self.vocab_size - 2)

    def encode(self, text: str) -> list[int]:
        """Lowercase, split on whitespace/punctuation, hash, frame, truncate.

        BOS is prepended and EOS appended; sequences longer than max_len
        are cut to max_len with EOS forced at the final position.
        """
        if not text or not text.strip():
            raise EmptyTextError("cannot tokenize empty text")
        words = _WORD_RE.findall(text.lower())
        if not words:
            raise EmptyTextError(f"no tokenizable words in {text!r}")
        ids = [BOS_ID] + [self.token_id(w) for w in words] + [EOS_ID]
        if len(ids) > self.max_len:
            ids = ids[: self.max_len - 1] + [EOS_ID]
        return ids
