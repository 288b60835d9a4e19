"""SplitMix64 generator with bit-identical Python and numba versions.

Walk seeds are derived as ``mix64(base_seed + (index + 1) * GOLDEN)``.
Bounded draws use ``((x >> 11) * bound) >> 53``: one draw per call, with
bias below ``bound / 2**53``.
"""

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, index: int) -> int:
    return mix64(base_seed + (index + 1) * GOLDEN)


class SplitMix64:
    """Reference implementation, used by the pure-Python walker."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def below(self, bound: int) -> int:
        return ((self.next() >> 11) * bound) >> 53


_GOLDEN_U = np.uint64(GOLDEN)
_M1_U = np.uint64(_M1)
_M2_U = np.uint64(_M2)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_S53 = np.uint64(53)


@njit(nogil=True, cache=True)
def rng_next(rs):
    """Advance the uint64 state held in ``rs[0]`` and return the output."""
    s = rs[0] + _GOLDEN_U
    rs[0] = s
    z = (s ^ (s >> _S30)) * _M1_U
    z = (z ^ (z >> _S27)) * _M2_U
    return z ^ (z >> _S31)


@njit(nogil=True, cache=True)
def rng_below(rs, bound):
    # (x >> 11) * bound must fit in 64 bits: bound < 2**11
    x = rng_next(rs)
    return np.int64(((x >> _S11) * np.uint64(bound)) >> _S53)
