"""Seeded pseudo-random numbers.

The generator is xorshift64* (Vigna 2016) with its 64-bit state seeded through one
round of splitmix64, so any integer seed (including 0) yields a valid non-zero
state. Streams are pinned to this algorithm: the same seed always produces the
same weights and shuffles.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


class XorShift64Star:
    def __init__(self, seed: int):
        self.seed = seed
        self._state = _splitmix64(seed & _MASK) or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x ^= (x << 25) & _MASK
        x ^= x >> 27
        self._state = x
        return (x * _MULT) & _MASK

    def random(self) -> float:
        """Uniform draw in ``[0, 1)`` with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        if size is None:
            return low + (high - low) * self.random()
        n = int(np.prod(size))
        draws = np.fromiter((self.next_u64() >> 11 for _ in range(n)), dtype=np.float64, count=n)
        return (low + (high - low) * draws * (1.0 / (1 << 53))).reshape(size)

    def randbelow(self, n: int) -> int:
        return (self.next_u64() * n) >> 64

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates shuffle of ``range(n)``."""
        out = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randbelow(i + 1)
            out[i], out[j] = out[j], out[i]
        return np.asarray(out, dtype=np.int64)


def seeded_rng(seed: int) -> XorShift64Star:
    return XorShift64Star(seed)
