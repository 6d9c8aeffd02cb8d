"""Deterministic, counter-based random number generation.

Every randomized choice in the package is derived from a 64-bit seed via
splitmix64, a fixed mixing function, so outputs are bit-identical across
runs, platforms, and process counts.  The core primitive is stateless:
``raw_u64(seed, start, n)`` returns words ``start+1 .. start+n`` of the
stream for ``seed``, which makes bulk generation vectorizable and lets
independent workers draw non-overlapping values without coordination.

Seed derivation used throughout (documented contract): the per-purpose
seed for parts ``(p1, p2, ...)`` is ``mix64(p1, p2, ...)`` where

    mix64(parts) = fold(lambda s, p: splitmix64(s XOR (p mod 2**64)), parts, 0)

and splitmix64 is the finalizer from Steele et al.'s SplittableRandom:

    z  = (x + 0x9E3779B97F4A7C15) mod 2**64
    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9  (mod 2**64)
    z ^= z >> 27;  z *= 0x94D049BB133111EB  (mod 2**64)
    z ^= z >> 31

In particular, the seed for scene ``k`` of a dataset with master seed
``m`` is ``mix64(SCENE_SALT, m, k)``, so any scene is reproducible
without generating its predecessors.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# Purpose salts for derived seeds (part of the on-disk determinism contract).
SCENE_SALT = 0x5CE17E
QUESTION_SALT = 0x9E57
REVERB_SALT = 0x4E7B
SPLIT_SALT = 0x5B117
TIMBRE_SALT = 0x713B4E


def splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def mix64(*parts: int) -> int:
    """Fold integer parts into one 64-bit seed (order-sensitive)."""
    s = 0
    for p in parts:
        s = splitmix64(s ^ (int(p) & _MASK))
    return s


def raw_u64(seed: int, start: int, n: int) -> np.ndarray:
    """Words start+1..start+n of the splitmix64 counter stream for seed."""
    idx = np.arange(start + 1, start + n + 1, dtype=np.uint64)
    z = (np.uint64(seed & _MASK) + idx * np.uint64(_GOLDEN)) & np.uint64(_MASK)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class SeedStream:
    """Stateful cursor over the counter stream of one seed.

    All draws are pure functions of (seed, cursor position); the object
    only tracks how many words have been consumed.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        self._pos = 0

    def _take(self, n: int) -> np.ndarray:
        out = raw_u64(self.seed, self._pos, n)
        self._pos += n
        return out

    def uniform_array(self, n: int) -> np.ndarray:
        """n float64 values uniform in [0, 1)."""
        return (self._take(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return float(lo + (hi - lo) * self.uniform_array(1)[0])

    def normal_array(self, n: int) -> np.ndarray:
        """n standard normal values via Box-Muller (no rejection)."""
        m = (n + 1) // 2
        # u1 in (0, 1] so log is finite
        u1 = (self._take(m).astype(np.float64) + 1.0) * 2.0**-64
        u2 = (self._take(m) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        r = np.sqrt(-2.0 * np.log(u1))
        out = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])
        return out[:n]

    def randint(self, n: int) -> int:
        """Integer uniform in [0, n)."""
        if n <= 0:
            raise ValueError("randint upper bound must be positive")
        return int(self.uniform_array(1)[0] * n)

    def choice(self, seq):
        return seq[self.randint(len(seq))]
