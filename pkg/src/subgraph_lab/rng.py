"""Deterministic PRNG: splitmix64 seeding a xoshiro256** generator.

The algorithms are spelled out (rather than delegated to a library) so that an
independent implementation can reproduce every stream bit for bit.  Substreams
are derived by name, e.g. ``Rng(seed).substream("weights")``, so each component
of a run owns its own independent sequence.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, (z ^ (z >> 31)) & MASK64


def _fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) & MASK64
    return h


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Rng:
    """xoshiro256** seeded via splitmix64 from a 64-bit seed."""

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        state = self.seed
        s = []
        for _ in range(4):
            state, out = _splitmix64(state)
            s.append(out)
        self._s = s

    def substream(self, name: str) -> "Rng":
        """Independent generator derived from (seed, name)."""
        return Rng(self.seed ^ _fnv1a64(name.encode("utf-8")))

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def uniform(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniforms(self, shape) -> "np.ndarray":
        import numpy as np

        total = int(np.prod(shape)) if shape else 1
        vals = [self.uniform() for _ in range(total)]
        return np.array(vals, dtype=np.float64).reshape(shape)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive (rejection-free modulo is fine at desk scale)."""
        span = hi - lo + 1
        if span <= 0:
            raise ValueError("empty range")
        # rejection sampling to keep the draw exactly uniform
        limit = (MASK64 + 1) - ((MASK64 + 1) % span)
        while True:
            x = self.next_u64()
            if x < limit:
                return lo + x % span

    def normal(self) -> float:
        """Standard normal via Box-Muller (consumes two uniforms)."""
        u1 = self.uniform()
        u2 = self.uniform()
        while u1 == 0.0:
            u1 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def normals(self, shape) -> "np.ndarray":
        import numpy as np

        total = int(np.prod(shape)) if shape else 1
        vals = [self.normal() for _ in range(total)]
        return np.array(vals, dtype=np.float64).reshape(shape)

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates shuffle of range(n)."""
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randint(0, i)
            perm[i], perm[j] = perm[j], perm[i]
        return perm

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(0, i)
            items[i], items[j] = items[j], items[i]
