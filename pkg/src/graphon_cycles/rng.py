"""Seeded randomness: SplitMix64 seeding, xoshiro256** streams, seed derivation.

:class:`RngStream` is a single scalar stream. :class:`LaneRng` advances many
independent streams in lockstep with numpy; lane ``k`` of a ``LaneRng``
produces exactly the sequence of ``RngStream(seeds[k])``.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil
from typing import Sequence

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
TWO53 = 1 << 53


def fmix64(z: int) -> int:
    """SplitMix64 output finalizer (a bijection on 64-bit words)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def splitmix64_sequence(seed: int, count: int) -> list[int]:
    out = []
    x = seed & MASK64
    for _ in range(count):
        x = (x + GOLDEN) & MASK64
        out.append(fmix64(x))
    return out


def derive_trial_seed(master: int, labels: Sequence[int]) -> int:
    """Fold integer labels into a master seed.

    For fixed labels the map master -> seed is a bijection, so distinct
    masters never collide; label order matters.
    """
    h = fmix64((master + GOLDEN) & MASK64)
    for label in labels:
        h = fmix64(((h + GOLDEN) & MASK64) ^ (int(label) & MASK64))
    return h


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def uniform_threshold(p: Fraction) -> int:
    """Smallest 53-bit integer K with K / 2**53 >= p; ``u < p`` iff ``K_u < threshold``."""
    return ceil(Fraction(p) * TWO53)


def cumulative_thresholds(weights: Sequence[Fraction]) -> list[int]:
    """Integer inverse-CDF cut points for a categorical draw on 53-bit uniforms."""
    cut = []
    acc = Fraction(0)
    for w in weights[:-1]:
        acc += Fraction(w)
        cut.append(uniform_threshold(acc))
    return cut


class RngStream:
    """xoshiro256** with state expanded from a 64-bit seed via SplitMix64."""

    __slots__ = ("s",)

    def __init__(self, seed: int):
        self.s = splitmix64_sequence(seed, 4)

    def clone(self) -> "RngStream":
        other = RngStream.__new__(RngStream)
        other.s = list(self.s)
        return other

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return result

    def next_u53(self) -> int:
        return self.next_u64() >> 11

    def uniform(self) -> float:
        """Uniform on [0, 1) with 53 bits of resolution."""
        return self.next_u53() / TWO53

    def categorical(self, thresholds: Sequence[int]) -> int:
        k = self.next_u53()
        c = 0
        for t in thresholds:
            if k >= t:
                c += 1
        return c

    def bernoulli(self, threshold: int) -> bool:
        return self.next_u53() < threshold

    def normal_pair(self) -> tuple[float, float]:
        """Two independent standard normals by Box-Muller."""
        u1 = (self.next_u53() + 1) / TWO53
        u2 = self.next_u53() / TWO53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        return float(r * np.cos(theta)), float(r * np.sin(theta))

    def normals(self, count: int) -> list[float]:
        out: list[float] = []
        while len(out) < count:
            out.extend(self.normal_pair())
        return out[:count]


def _np_fmix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def derive_seeds(master: int, prefix: Sequence[int], last: np.ndarray) -> np.ndarray:
    """Vectorised ``derive_trial_seed(master, [*prefix, l])`` over an array of last labels."""
    h = derive_trial_seed(master, prefix)
    base = np.uint64((h + GOLDEN) & MASK64)
    labels = np.asarray(last, dtype=np.int64).astype(np.uint64)
    return _np_fmix(base ^ labels)


class LaneRng:
    """Many xoshiro256** streams advanced in lockstep (one per lane)."""

    def __init__(self, seeds: np.ndarray):
        x = np.asarray(seeds, dtype=np.uint64).copy()
        state = []
        for _ in range(4):
            x = x + np.uint64(GOLDEN)
            state.append(_np_fmix(x))
        self.s0, self.s1, self.s2, self.s3 = state

    @property
    def lanes(self) -> int:
        return self.s0.shape[0]

    def next_u64(self) -> np.ndarray:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        x = s1 * np.uint64(5)
        result = ((x << np.uint64(7)) | (x >> np.uint64(57))) * np.uint64(9)
        t = s1 << np.uint64(17)
        s2 = s2 ^ s0
        s3 = s3 ^ s1
        s1 = s1 ^ s2
        s0 = s0 ^ s3
        s2 = s2 ^ t
        s3 = (s3 << np.uint64(45)) | (s3 >> np.uint64(19))
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def next_u53(self) -> np.ndarray:
        return self.next_u64() >> np.uint64(11)

    def categorical(self, thresholds: Sequence[int]) -> np.ndarray:
        k = self.next_u53()
        c = np.zeros(k.shape, dtype=np.int64)
        for t in thresholds:
            c += k >= np.uint64(t)
        return c

    def normal_pair(self) -> tuple[np.ndarray, np.ndarray]:
        u1 = (self.next_u53() + np.uint64(1)).astype(np.float64) / TWO53
        u2 = self.next_u53().astype(np.float64) / TWO53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        return r * np.cos(theta), r * np.sin(theta)

    def normals(self, count: int) -> np.ndarray:
        """Array of shape (lanes, count); each lane consumes draws like ``RngStream.normals``."""
        cols = []
        while len(cols) < count:
            cols.extend(self.normal_pair())
        return np.stack(cols[:count], axis=1)
