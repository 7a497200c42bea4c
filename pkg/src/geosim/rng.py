"""Deterministic seeded random streams.

Every random choice in a run draws from a stream derived from the global
run seed plus a key such as (automaton id, tick, stream name). Streams are
independent of each other and of iteration order, which is what makes the
synchronous step permutation-invariant and runs reproducible bit for bit.

The generator is splitmix64: pure 64-bit integer arithmetic, implemented
identically here and in the compiled kernel so both backends produce the
same draws.
"""

from __future__ import annotations

MASK = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def derive_state(seed: int, *parts: int) -> int:
    """Fold key parts into an independent stream state."""
    s = seed & MASK
    for p in parts:
        s = (s + GOLDEN) & MASK
        s = mix64(s ^ (p & MASK))
    return s


def string_key(name: str) -> int:
    """Stable 64-bit key for a stream name (FNV-1a over UTF-8)."""
    h = 0xCBF29CE484222325
    for b in name.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & MASK
    return h


class Stream:
    """A single splitmix64 stream; successive draws advance the state."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = state & MASK

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK
        return mix64(self.state)

    def uniform(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n). n must be positive."""
        return int(self.uniform() * n)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates using this stream."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


class SeededRng:
    """Root of all randomness in one run: a seed plus derived streams.

    Passing a SeededRng to an operation hands it the run seed; the
    operation derives whatever sub-streams it documents, so identical
    (inputs, seed) pairs always see identical draws.
    """

    __slots__ = ("seed",)

    def __init__(self, seed: int):
        self.seed = seed & MASK

    def stream(self, *parts: int | str) -> Stream:
        keys = [string_key(p) if isinstance(p, str) else p for p in parts]
        return Stream(derive_state(self.seed, *keys))
