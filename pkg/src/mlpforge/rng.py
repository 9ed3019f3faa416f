"""Deterministic random number generation.

SplitMix64 with a fixed 64-bit state, so that a given seed produces the
same stream on every platform and in every implementation of this
library.  Floats are derived from the top 53 bits of each output word,
giving uniform() values in [0, 1).
"""

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TO_UNIT = 2.0 ** -53


class DeterministicRng:
    """SplitMix64 stream; equal seeds give bit-identical streams."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self.state = self.seed

    def next_u64(self) -> int:
        """Advance the state and return the next 64-bit output word."""
        # int() guards against numpy scalars assigned into .state
        self.state = (int(self.state) + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1), from the top 53 bits of one word."""
        return (self.next_u64() >> 11) * _TO_UNIT

    def uniform_signed(self) -> float:
        """Uniform double in [-1, 1), computed as uniform() * 2 - 1."""
        return self.uniform() * 2.0 - 1.0
