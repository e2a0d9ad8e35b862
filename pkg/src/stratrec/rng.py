"""Seedable, portable random number generation.

The generator is SplitMix64: state advances by a fixed odd constant and the
output is a bit-mixing function of the state, so the n-th state is
``seed + n * GOLDEN (mod 2**64)``.  That closed form lets bulk draws be
produced with vectorized uint64 numpy arithmetic while staying bit-identical
to scalar stepping, which matters when generating model coefficients for a
million strategies.

Substreams are derived from the parent's initial seed and a text label, never
from its current position, so the set of substreams a caller creates does not
depend on how many values were drawn in between ("stream independence"), and
drawing more values from any stream extends it without perturbing the prefix
("prefix property").
"""

from __future__ import annotations

import math

import numpy as np

_GOLDEN = 0x9E3779B97F4B7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

_INV_2_53 = 2.0 ** -53


def mix64(z: int) -> int:
    """Finalizing bit mixer; full 64-bit avalanche of ``z``."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def fnv1a64(text: str) -> int:
    """FNV-1a 64-bit hash of ``text`` (UTF-8)."""
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK
    return h


def derive_seed(seed: int, label: str) -> int:
    """Deterministic child seed for ``label``, independent of draw order."""
    return mix64((seed & _MASK) ^ fnv1a64(label))


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Deterministic stream of uniforms/normals with labeled substreams."""

    def __init__(self, seed: int) -> None:
        self._seed = seed & _MASK
        self._state = self._seed

    @property
    def seed(self) -> int:
        return self._seed

    def substream(self, label: str) -> "SplitMix64":
        """Independent stream derived from this stream's seed and ``label``."""
        return SplitMix64(derive_seed(self._seed, label))

    def next_uint64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return mix64(self._state)

    def uint64s(self, n: int) -> np.ndarray:
        """Next ``n`` outputs as a uint64 array; same stream as scalar calls."""
        if n < 0:
            raise ValueError(f"draw count must be >= 0, got {n}")
        steps = np.arange(1, n + 1, dtype=np.uint64)
        states = np.uint64(self._state) + np.uint64(_GOLDEN) * steps
        self._state = (self._state + _GOLDEN * n) & _MASK
        return _mix64_array(states)

    def random(self) -> float:
        """Next double in [0, 1) from the top 53 bits of one output."""
        return (self.next_uint64() >> 11) * _INV_2_53

    def uniforms(self, n: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        """Next ``n`` doubles, affinely mapped onto [low, high)."""
        u = (self.uint64s(n) >> np.uint64(11)).astype(np.float64) * _INV_2_53
        if low != 0.0 or high != 1.0:
            u = low + (high - low) * u
        return u

    def normals(self, n: int, mean: float = 0.0, std: float = 1.0) -> np.ndarray:
        """Next ``n`` normal deviates via Box-Muller on uniform pairs.

        Consumes ``2 * ceil(n / 2)`` uniforms so the mapping from stream
        position to output is fixed regardless of how calls are batched
        across identical totals.
        """
        pairs = (n + 1) // 2
        u = self.uniforms(2 * pairs)
        u1, u2 = u[0::2], u[1::2]
        r = np.sqrt(-2.0 * np.log1p(-u1))
        theta = 2.0 * math.pi * u2
        z = np.empty(2 * pairs)
        z[0::2] = r * np.cos(theta)
        z[1::2] = r * np.sin(theta)
        return mean + std * z[:n]

    def below(self, bound: int) -> int:
        """Next integer in [0, bound)."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        return min(int(self.random() * bound), bound - 1)

    def sample_indices(self, population: int, k: int) -> list[int]:
        """k distinct indices from range(population), partial Fisher-Yates."""
        if k > population:
            raise ValueError(f"cannot sample {k} from population {population}")
        pool = list(range(population))
        for i in range(k):
            j = i + self.below(population - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
