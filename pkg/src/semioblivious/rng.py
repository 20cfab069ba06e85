"""Counter-based randomness: splitmix64 streams keyed by (seed, *keys).

Every random draw in the package is a pure function of an explicit seed and
the coordinates of the draw (pair, attempt, trial, ...), so per-pair
sampling is reproducible regardless of evaluation order or of which subset
of pairs is materialised.
"""
from __future__ import annotations

import numpy as np

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TO_UNIT = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * _M1) & MASK
    z = ((z ^ (z >> 27)) * _M2) & MASK
    return z ^ (z >> 31)


def derive(seed: int, *keys: int) -> int:
    """Stream key for ``seed`` specialised by integer ``keys``."""
    h = mix64((seed & MASK) + GOLDEN)
    for k in keys:
        h = mix64(h ^ (k & MASK))
    return h


class Stream:
    """Sequential draws from one derived key."""

    __slots__ = ("key", "i")

    def __init__(self, key: int):
        self.key = key
        self.i = 0

    def next64(self) -> int:
        self.i += 1
        return mix64(self.key + self.i * GOLDEN)

    def random(self) -> float:
        return (self.next64() >> 11) * _TO_UNIT

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection (unbiased)."""
        if n <= 0:
            raise ValueError("n must be positive")
        if n & (n - 1) == 0:
            return self.next64() & (n - 1)
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next64()
            if x < limit:
                return x % n


def stream(seed: int, *keys: int) -> Stream:
    return Stream(derive(seed, *keys))


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def derive_many(seed: int, *keys) -> np.ndarray:
    """Vectorised :func:`derive`: each key argument is an int or an int array."""
    arrays = np.broadcast_arrays(*[np.asarray(k, dtype=np.int64) for k in keys]) if keys else []
    shape = arrays[0].shape if keys else ()
    with np.errstate(over="ignore"):
        h = np.full(shape, mix64((seed & MASK) + GOLDEN), dtype=np.uint64)
        for k in arrays:
            h = _mix_array(h ^ k.astype(np.uint64))
    return h


def uniforms(keys: np.ndarray, count: int) -> np.ndarray:
    """Matrix ``U[j, i]``: the i-th uniform of stream ``keys[j]``.

    Matches ``Stream(keys[j]).random()`` called ``count`` times.
    """
    keys = np.asarray(keys, dtype=np.uint64)
    steps = (np.arange(1, count + 1, dtype=np.uint64) * np.uint64(GOLDEN))
    with np.errstate(over="ignore"):
        z = _mix_array(keys[:, None] + steps[None, :])
    return (z >> np.uint64(11)).astype(np.float64) * _TO_UNIT
