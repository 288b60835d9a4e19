"""Incremental detection of forbidden powers under push/pop of letters.

The index keeps, for every position ``j`` and row ``i``, the end position
of the previous occurrence of the length-``2**i`` factor ending at ``j``
(``0`` stands for "no occurrence"). Row ``i+1`` is derived from row ``i``
by walking the occurrence chains of the two halves right to left.

A suffix with period ``p`` is a forbidden power iff the suffix of length
``e(p) = forbidden_power_length(p) - p`` recurs ``p`` positions earlier.
Every period whose ``e(p)`` lies in ``[2**i, 2**(i+1))`` therefore appears
in the occurrence chain of the length-``2**i`` suffix, within a bounded
window; each such candidate is confirmed by comparing the remaining
``e(p) - 2**i`` letters directly. This covers overlapping occurrences, so
exponents below 2 are handled by the same code path as squares.

All positions are 1-based; row storage is preallocated for the capacity.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .lang import LanguageSpec, SpecError, forbidden_power_length

# meta slots
_LEN, _CAP, _PUSHES, _PROBES, _ROWS = 0, 1, 2, 3, 4


@njit(nogil=True, cache=True)
def power_push(state, a):
    word, rep, height, last, meta, elen, plo, phi = state
    j = meta[_LEN] + 1
    meta[_LEN] = j
    meta[_PUSHES] += 1
    rows = meta[_ROWS]
    word[j] = a
    rep[0, j] = last[a]
    last[a] = j
    height[j] = 1
    probes = 1  # row-0 cell via the last-occurrence table
    free = True
    i = 0
    while True:
        half = 1 << i
        lo = plo[i]
        hi = min(phi[i], j - 1)
        if lo <= hi:
            y = rep[i, j]
            probes += 1
            while y > 0:
                p = j - y
                if p > hi:
                    break
                if p >= lo:
                    e = elen[p]
                    if e <= y:
                        ok = True
                        for t in range(j - e + 1, j - half + 1):
                            probes += 1
                            if word[t] != word[t - p]:
                                ok = False
                                break
                        if ok:
                            free = False
                            break
                if height[y] > i:
                    y = rep[i, y]
                    probes += 1
                else:
                    y = 0
            if not free:
                break
        if i + 1 >= rows:
            break
        # previous occurrence of the length-2*half suffix vz
        val = 0
        if j >= 2 * half:
            x = rep[i, j]
            u = j - half
            yv = rep[i, u] if height[u] > i else 0
            probes += 2
            while x > 0 and yv > 0:
                if x < 2 * half:
                    x = 0
                    break
                d = x - half
                if d == yv:
                    val = x
                    break
                if d > yv:
                    x = rep[i, x] if height[x] > i else 0
                else:
                    yv = rep[i, yv] if height[yv] > i else 0
                probes += 1
        rep[i + 1, j] = val
        height[j] = i + 2
        if val == 0:
            break
        i += 1
    meta[_PROBES] += probes
    return free


@njit(nogil=True, cache=True)
def power_pop(state):
    word, rep, height, last, meta, elen, plo, phi = state
    j = meta[_LEN]
    last[word[j]] = rep[0, j]
    meta[_LEN] = j - 1


def _build_tables(spec: LanguageSpec, capacity: int):
    bound = capacity if spec.period_bound is None else min(spec.period_bound, capacity)
    elen = np.zeros(capacity + 2, dtype=np.int64)
    max_e = 1
    for p in range(1, capacity + 1):
        e = forbidden_power_length(spec.power, p) - p
        elen[p] = e
        if p <= bound and e + p <= capacity:
            max_e = max(max_e, e)
    rows = max_e.bit_length()
    plo = np.full(rows, capacity + 1, dtype=np.int64)
    phi = np.zeros(rows, dtype=np.int64)
    for p in range(1, bound + 1):
        e = int(elen[p])
        i = e.bit_length() - 1
        if i < rows:
            plo[i] = min(plo[i], p)
            phi[i] = max(phi[i], p)
    return elen, plo, phi, rows


class PowerChecker:
    """Online checker for beta-power-free (or beta+-power-free) words.

    Parameters
    ----------
    spec : LanguageSpec
        A power-free spec, optionally period-bounded.
    capacity : int
        Maximum word length.
    """

    def __init__(self, spec: LanguageSpec, capacity: int):
        if spec.is_abelian:
            raise SpecError("PowerChecker needs a power-free spec")
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.spec = spec
        self.sigma = spec.sigma
        self.capacity = capacity
        elen, plo, phi, rows = _build_tables(spec, capacity)
        meta = np.zeros(5, dtype=np.int64)
        meta[_CAP] = capacity
        meta[_ROWS] = rows
        self._state = (
            np.zeros(capacity + 1, dtype=np.int32),
            np.zeros((rows, capacity + 1), dtype=np.int32),
            np.zeros(capacity + 1, dtype=np.int8),
            np.zeros(spec.sigma, dtype=np.int32),
            meta,
            elen,
            plo,
            phi,
        )
        self._pending = False

    @property
    def rows(self) -> int:
        return int(self._state[4][_ROWS])

    def __len__(self):
        return int(self._state[4][_LEN])

    @property
    def word(self) -> tuple:
        return tuple(int(a) for a in self._state[0][1:len(self) + 1])

    def push(self, a: int) -> bool:
        """Append ``a``; return whether the word is still power-free.

        After a ``False`` verdict the letter stays on the stack and must be
        popped before the next push.
        """
        if self._pending:
            raise RuntimeError("pop the rejected letter before pushing again")
        if len(self) >= self.capacity:
            raise OverflowError(f"capacity {self.capacity} exceeded")
        if not 0 <= a < self.sigma:
            raise ValueError(f"letter {a} outside alphabet of size {self.sigma}")
        ok = bool(power_push(self._state, a))
        self._pending = not ok
        return ok

    def pop(self) -> None:
        if len(self) == 0:
            raise IndexError("pop from empty word")
        power_pop(self._state)
        self._pending = False

    def repeat(self, i: int, j: int) -> int:
        """Previous-occurrence cell of row ``i`` at position ``j`` (0 if none)."""
        word, rep, height = self._state[:3]
        if not 1 <= j <= len(self):
            raise IndexError(j)
        return int(rep[i, j]) if height[j] > i else 0

    @property
    def pushes(self) -> int:
        return int(self._state[4][_PUSHES])

    def average_probe_count(self) -> float:
        """Mean number of index cells and letters examined per push."""
        meta = self._state[4]
        if meta[_PUSHES] == 0:
            raise ValueError("no pushes recorded")
        return float(meta[_PROBES]) / float(meta[_PUSHES])

    def reset_statistics(self) -> None:
        self._state[4][_PUSHES] = 0
        self._state[4][_PROBES] = 0

    def kernel(self):
        return power_push, power_pop, self._state
