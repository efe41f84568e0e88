"""Seeded random number generation shared by the reference engines and the
SimScript interpreter.

The generator is SplitMix64 (Vigna's constants), chosen because it is trivial
to reimplement bit-exactly in any language: one 64-bit additive state update
and two xor-multiply mixing rounds per output.  Floats in [0, 1) take the top
53 bits of one output word, so every distribution draw below consumes exactly
one u64 from the stream.  Run traces compare byte-for-byte only because both
execution paths share this module.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """SplitMix64 stream over a 64-bit seed."""

    def __init__(self, seed: int):
        if not 0 <= seed <= MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self._state = seed

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform double in [0, 1): top 53 bits of one output word."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, low: float, high: float) -> float:
        return low + self.next_float() * (high - low)

    def uniform_int(self, low: int, high: int) -> int:
        """Integer in [low, high], both ends inclusive."""
        return int(low + math.floor(self.next_float() * (high - low + 1)))

    def exponential(self, mean: float) -> float:
        """Inverse-CDF sample: -mean * ln(1 - u)."""
        return -mean * math.log(1.0 - self.next_float())
