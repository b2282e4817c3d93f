"""Counter-based deterministic random stream.

Every game state owns one of these. Randomness is a pure function of
(seed, counter), so cloned states replay identically and serialized
states capture the full RNG position in two integers.
"""
from __future__ import annotations

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: bijective 64-bit mix."""
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


def derive_seed(seed: int, *salts: int) -> int:
    """Derive an independent 64-bit seed from a base seed and salt values."""
    z = seed & _MASK
    for s in salts:
        z = mix64((z + _GOLDEN + (s & _MASK)) & _MASK)
    return mix64(z)


class RandomStream:
    """SplitMix64 stream addressed by (seed, counter)."""

    __slots__ = ("seed", "counter")

    def __init__(self, seed: int, counter: int = 0):
        self.seed = seed & _MASK
        self.counter = counter

    def clone(self) -> "RandomStream":
        return RandomStream(self.seed, self.counter)

    def next_u64(self) -> int:
        self.counter += 1
        return mix64((self.seed + self.counter * _GOLDEN) & _MASK)

    def randrange(self, n: int) -> int:
        # Modulo bias is ~n/2^64: irrelevant for game-sized n.
        return self.next_u64() % n

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def shuffle(self, seq: list) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.randrange(i + 1)
            seq[i], seq[j] = seq[j], seq[i]
