"""Counter-based random stream with in-repo constants.

Word ``i`` of a stream is ``mix64(seed + (counter + i + 1) * GOLDEN)``
where ``mix64`` is the SplitMix64 finalizer; this reproduces the
SplitMix64 output sequence while allowing random access by counter.
Drawing ``n`` values advances the counter by exactly ``n``, so any
position in the stream is addressable from ``(seed, counter)`` alone
and results are byte-identical across platforms.

Standard normals come from the inverse normal CDF applied to one
53-bit uniform per element.
"""
from __future__ import annotations

import numpy as np
from scipy.special import ndtri

from .tensor import Tensor

GOLDEN = 0x9E3779B97F4A7C15          # SplitMix64 increment
_MIX_A = 0xBF58476D1CE4E5B9          # finalizer multiplier 1
_MIX_B = 0x94D049BB133111EB          # finalizer multiplier 2
_FNV_BASIS = 0xCBF29CE484222325      # FNV-1a 64-bit offset basis
_FNV_PRIME = 0x100000001B3           # FNV-1a 64-bit prime
_U64 = 0xFFFFFFFFFFFFFFFF


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = z.copy()
    z ^= z >> np.uint64(30)
    z *= np.uint64(_MIX_A)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_MIX_B)
    z ^= z >> np.uint64(31)
    return z


def _mix_int(z: int) -> int:
    z &= _U64
    z ^= z >> 30
    z = (z * _MIX_A) & _U64
    z ^= z >> 27
    z = (z * _MIX_B) & _U64
    z ^= z >> 31
    return z


def _fnv1a(text: str) -> int:
    h = _FNV_BASIS
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _U64
    return h


class RngStream:
    """Deterministic random source addressed by ``(seed, counter)``."""

    def __init__(self, seed: int, counter: int = 0):
        self.seed = int(seed) & _U64
        self.counter = int(counter) & _U64

    def __repr__(self):
        return f"RngStream(seed={self.seed}, counter={self.counter})"

    def words(self, n: int) -> np.ndarray:
        """Next ``n`` raw 64-bit words; advances the counter by ``n``."""
        base = (self.counter + 1) & _U64
        idx = np.uint64(base) + np.arange(n, dtype=np.uint64)
        words = _mix_array(np.uint64(self.seed) + idx * np.uint64(GOLDEN))
        self.counter = (self.counter + n) & _U64
        return words

    def uniform(self, shape=()) -> np.ndarray:
        """Uniform draws on the open interval (0, 1)."""
        n = int(np.prod(shape)) if shape else 1
        u = ((self.words(n) >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
        return u.reshape(shape) if shape else u[0]

    def standard_normal(self, shape=()) -> np.ndarray:
        """I.i.d. N(0, 1) draws; consumes one word per element."""
        return ndtri(self.uniform(shape))

    def permutation(self, n: int) -> np.ndarray:
        """A random permutation of ``range(n)``."""
        return np.argsort(self.uniform((n,)), kind="stable")

    def derive(self, label: str) -> "RngStream":
        """Independent child stream for the given purpose label.

        The same (seed, label) pair always yields the same child, so
        every consumer in an experiment can be replayed in isolation.
        """
        return RngStream(_mix_int(self.seed ^ _mix_int(_fnv1a(label))))


def sample_standard_normal(rng: RngStream, shape) -> Tensor:
    """Tensor of i.i.d. standard normal draws from the stream."""
    return Tensor(rng.standard_normal(tuple(shape)))
