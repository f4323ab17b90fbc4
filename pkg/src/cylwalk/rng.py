"""Counter-based pseudo-random streams for reproducible simulations.

Every replica of an experiment owns one SplitMix64 output stream, derived
deterministically from (seed, replica index).  Because the generator is a
pure function of a 64-bit counter, the same stream can be consumed one value
at a time (scalar walk loops, compiled or pure Python) or in vectorized
numpy batches, with bit-identical results either way.  That is what makes
replays and cross-backend comparisons exact.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
REPLICA_SALT = 0xD1B54A32D192ED03


def mix64(x: int) -> int:
    """SplitMix64 finalizer: a bijective scramble of a 64-bit integer."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def stream_base(seed: int, replica: int = 0) -> int:
    """64-bit base of the output stream for one (seed, replica) pair."""
    return mix64(mix64(seed & MASK64) ^ mix64(((replica + 1) * REPLICA_SALT) & MASK64))


class Stream:
    """A single replica's random stream.

    Output k of the stream is ``mix64(base + (k+1)*GAMMA)``.  The object
    only stores (base, counter), so kernels can check the counter out,
    advance it in native code, and check it back in.
    """

    __slots__ = ("base", "k")

    def __init__(self, seed: int, replica: int = 0):
        self.base = stream_base(seed, replica)
        self.k = 0

    @classmethod
    def resume(cls, base: int, k: int) -> "Stream":
        s = cls.__new__(cls)
        s.base = base
        s.k = k
        return s

    def next_u64(self) -> int:
        self.k += 1
        return mix64((self.base + self.k * GAMMA) & MASK64)

    def below(self, m: int) -> int:
        """Uniform integer in [0, m).

        Plain modulo; the bias is m / 2**64, invisible at any sample size
        this package uses.
        """
        return self.next_u64() % m

    def batch_u64(self, n: int) -> np.ndarray:
        """The next n outputs as a uint64 array (same values the scalar
        path would produce, in the same order)."""
        ks = np.arange(self.k + 1, self.k + n + 1, dtype=np.uint64)
        self.k += n
        return mix64_np(np.uint64(self.base) + ks * np.uint64(GAMMA))

    def state(self) -> tuple[int, int]:
        return self.base, self.k

    def set_state(self, base: int, k: int) -> None:
        self.base = base
        self.k = k


def mix64_np(x: np.ndarray) -> np.ndarray:
    """Vectorized mix64 on a uint64 array."""
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(0xBF58476D1CE4E5B9)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))
