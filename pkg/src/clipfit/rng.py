"""Deterministic 64-bit random stream (SplitMix64).

All stochastic choices in the engine (prompt draws, epoch shuffles) run on
this generator so sequences are reproducible across platforms and across
independent reimplementations: state advances by the golden-ratio gamma
0x9E3779B97F4A7C15 and outputs are finalized with the murmur-style mix
constants 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential SplitMix64 stream seeded with a 64-bit integer."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & MASK64
        return _mix(self._state)

    def next_below(self, n: int) -> int:
        """Uniform draw in [0, n). Modulo reduction; bias < n / 2**64."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def next_float(self) -> float:
        """Uniform double in [0, 1) with 53 random mantissa bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle driven by this stream."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]


def uniform_block(seed: int, count: int) -> np.ndarray:
    """Vectorized batch of uniform [0, 1) doubles.

    Bit-identical to ``count`` successive ``SplitMix64(seed).next_float()``
    calls: the i-th output's state is seed + i * gamma (mod 2**64), so the
    whole block evaluates elementwise on uint64 arrays.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed & MASK64) + np.uint64(_GAMMA) * idx
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


def derive_seed(seed: int, *salts: int) -> int:
    """Mix extra integers into a base seed to form an independent substream.

    Deterministic in (seed, salts); distinct salts give unrelated streams.
    """
    z = seed & MASK64
    for salt in salts:
        z = _mix((z + _GAMMA * ((salt & MASK64) + 1)) & MASK64)
    return z
