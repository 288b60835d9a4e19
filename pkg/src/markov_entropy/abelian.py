"""Incremental detection of Abelian k-power suffixes.

Per letter ``a`` the index keeps ``count[i, a]`` (occurrences of ``a`` in
``w[1..i]``) and ``pos[a, t]`` (position of the t-th ``a``). The suffix scan
tries block lengths ``i`` in increasing order. With ``V`` the Parikh vector
of the last ``i`` letters, a k-power with block length at least ``i``
needs ``(k-1)*V[a]`` copies of ``a`` before the last block; if the prefix
``w[1..n-i]`` lacks them the word is free. Otherwise ``l`` is the largest
position such that ``w[l..n-i]`` holds enough of every letter, and no
k-power suffix is shorter than ``n-l+1``, so the scan jumps ahead.

For ``k >= 3`` a tight ``l`` only fixes the total Parikh vector of the
first ``k-1`` blocks; the blocks are then compared one by one and the scan
moves to ``i+1`` if they differ.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .lang import LanguageSpec, SpecError

_LEN, _CAP, _PUSHES, _CHECKS, _SIGMA, _K, _TRACE = 0, 1, 2, 3, 4, 5, 6


@njit(nogil=True, cache=True)
def _blocks_equal(count, sigma, k, n, i):
    for a in range(sigma):
        v = count[n, a] - count[n - i, a]
        for t in range(1, k):
            hi = n - t * i
            if count[hi, a] - count[hi - i, a] != v:
                return False
    return True


@njit(nogil=True, cache=True)
def abelian_scan(state):
    """Return the block length of an Abelian k-power suffix, or 0."""
    word, count, pos, meta, trace = state
    n = meta[_LEN]
    sigma = meta[_SIGMA]
    k = meta[_K]
    l = n - 1
    i = 1
    checks = 0
    found = 0
    while True:
        if meta[_TRACE] < trace.shape[0]:
            trace[meta[_TRACE], 0] = i
            trace[meta[_TRACE], 1] = l
            meta[_TRACE] += 1
        checks += 1
        free = False
        for a in range(sigma):
            c = count[n - i, a]
            v = count[n, a] - c
            need = (k - 1) * v
            if need > c:
                free = True
                break
            if v > 0:
                la = pos[a, c - need + 1]
                if la < l:
                    l = la
        if free:
            break
        if l == n - k * i + 1:
            if k == 2 or _blocks_equal(count, sigma, k, n, i):
                found = i
                break
            i += 1
        else:
            i = (n - l + k) // k
    meta[_CHECKS] += checks
    return found


@njit(nogil=True, cache=True)
def abelian_push(state, a):
    word, count, pos, meta, trace = state
    j = meta[_LEN] + 1
    meta[_LEN] = j
    meta[_PUSHES] += 1
    word[j] = a
    for b in range(meta[_SIGMA]):
        count[j, b] = count[j - 1, b]
    count[j, a] += 1
    pos[a, count[j, a]] = j
    return abelian_scan(state) == 0


@njit(nogil=True, cache=True)
def abelian_pop(state):
    meta = state[3]
    meta[_LEN] -= 1


class AbelianChecker:
    """Online checker for Abelian-k-power-free words.

    ``trace_capacity > 0`` records ``(i, l)`` at the start of every scan
    iteration, for inspecting the loop invariant.
    """

    def __init__(self, spec: LanguageSpec, capacity: int, trace_capacity: int = 0):
        if not spec.is_abelian:
            raise SpecError("AbelianChecker needs an abelian spec")
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.spec = spec
        self.sigma = spec.sigma
        self.k = spec.power.k
        self.capacity = capacity
        meta = np.zeros(7, dtype=np.int64)
        meta[_CAP] = capacity
        meta[_SIGMA] = spec.sigma
        meta[_K] = self.k
        self._state = (
            np.zeros(capacity + 1, dtype=np.int32),
            np.zeros((capacity + 1, spec.sigma), dtype=np.int32),
            np.zeros((spec.sigma, capacity + 2), dtype=np.int32),
            meta,
            np.zeros((trace_capacity, 2), dtype=np.int64),
        )
        self._pending = False

    def __len__(self):
        return int(self._state[3][_LEN])

    @property
    def word(self) -> tuple:
        return tuple(int(a) for a in self._state[0][1:len(self) + 1])

    def push(self, a: int) -> bool:
        if self._pending:
            raise RuntimeError("pop the rejected letter before pushing again")
        if len(self) >= self.capacity:
            raise OverflowError(f"capacity {self.capacity} exceeded")
        if not 0 <= a < self.sigma:
            raise ValueError(f"letter {a} outside alphabet of size {self.sigma}")
        ok = bool(abelian_push(self._state, a))
        self._pending = not ok
        return ok

    def pop(self) -> None:
        if len(self) == 0:
            raise IndexError("pop from empty word")
        abelian_pop(self._state)
        self._pending = False

    def scan(self):
        """Block length of an Abelian k-power suffix of the current word, or None."""
        if len(self) == 0:
            return None
        meta = self._state[3]
        checks = meta[_CHECKS]
        found = int(abelian_scan(self._state))
        meta[_CHECKS] = checks
        return found or None

    def take_trace(self) -> list[tuple[int, int]]:
        meta, trace = self._state[3], self._state[4]
        out = [(int(i), int(l)) for i, l in trace[:meta[_TRACE]]]
        meta[_TRACE] = 0
        return out

    @property
    def pushes(self) -> int:
        return int(self._state[3][_PUSHES])

    def average_suffix_checks(self) -> float:
        """Mean number of candidate block lengths examined per push."""
        meta = self._state[3]
        if meta[_PUSHES] == 0:
            raise ValueError("no pushes recorded")
        return float(meta[_CHECKS]) / float(meta[_PUSHES])

    def reset_statistics(self) -> None:
        self._state[3][_PUSHES] = 0
        self._state[3][_CHECKS] = 0

    def kernel(self):
        return abelian_push, abelian_pop, self._state
