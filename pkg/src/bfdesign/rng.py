"""Portable seeded generator: splitmix64 seeding into xoshiro256**.

The stream contract is small enough to reimplement in any language:

* the 64-bit seed is expanded into the four xoshiro words by successive
  splitmix64 outputs;
* a double in the open interval (0, 1) is ``((x >> 12) + 0.5) * 2**-52``;
  both factors are exact, so the largest value is 1 - 2**-53
* chunk ``c`` of a chunked run uses the seed ``derive_seed(seed, c)``.

:class:`Xoshiro256` is the scalar reference.  :class:`LaneGenerator` runs
many independent streams side by side with numpy ``uint64`` arithmetic and
produces, lane for lane, exactly the scalar streams.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_DOUBLE_SCALE = 2.0 ** -52


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


def mix64(z):
    """The splitmix64 output finalizer."""
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed):
        self.state = int(seed) & MASK64

    def next(self):
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)


def derive_seed(seed, chunk):
    """Seed of chunk number ``chunk`` (0-based) in a chunked run."""
    return mix64((int(seed) + (int(chunk) + 1) * GOLDEN_GAMMA) & MASK64)


class Xoshiro256:
    """xoshiro256** with splitmix64 seeding; the scalar reference stream."""

    def __init__(self, seed):
        sm = SplitMix64(seed)
        self.s = [sm.next() for _ in range(4)]
        self.seed = int(seed) & MASK64

    def next_u64(self):
        s = self.s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self):
        """A double strictly inside (0, 1)."""
        return ((self.next_u64() >> 12) + 0.5) * _DOUBLE_SCALE

    def u64s(self, size):
        """``size`` successive outputs; the loop body is next_u64 inlined."""
        s0, s1, s2, s3 = self.s
        m = MASK64
        out = [0] * size
        for i in range(size):
            r = (s1 * 5) & m
            out[i] = ((((r << 7) | (r >> 57)) & m) * 9) & m
            t = (s1 << 17) & m
            s2 ^= s0
            s3 ^= s1
            s1 ^= s2
            s0 ^= s3
            s2 ^= t
            s3 = ((s3 << 45) | (s3 >> 19)) & m
        self.s = [s0, s1, s2, s3]
        return out

    def uniforms(self, size):
        x = np.array(self.u64s(size), dtype=np.uint64) >> np.uint64(12)
        return (x.astype(np.float64) + 0.5) * _DOUBLE_SCALE


class LaneGenerator:
    """Independent xoshiro256** streams advanced in lockstep.

    Lane ``i`` is seeded with ``seeds[i]`` and yields the same values as
    ``Xoshiro256(seeds[i])``.
    """

    def __init__(self, seeds):
        seeds = [int(s) & MASK64 for s in seeds]
        words = []
        for sd in seeds:
            sm = SplitMix64(sd)
            words.append([sm.next() for _ in range(4)])
        st = np.array(words, dtype=np.uint64).reshape(len(seeds), 4)
        self.s0, self.s1, self.s2, self.s3 = (st[:, j].copy() for j in range(4))

    @property
    def lanes(self):
        return self.s0.size

    @staticmethod
    def _rotl(x, k):
        return (x << np.uint64(k)) | (x >> np.uint64(64 - k))

    def next_u64(self):
        # uint64 products wrap modulo 2**64, which is exactly what we need
        result = self._rotl(self.s1 * np.uint64(5), 7) * np.uint64(9)
        t = self.s1 << np.uint64(17)
        self.s2 ^= self.s0
        self.s3 ^= self.s1
        self.s1 ^= self.s2
        self.s0 ^= self.s3
        self.s2 ^= t
        self.s3 = self._rotl(self.s3, 45)
        return result

    def uniform(self):
        """One double per lane, strictly inside (0, 1)."""
        x = self.next_u64() >> np.uint64(12)
        return (x.astype(np.float64) + 0.5) * _DOUBLE_SCALE
