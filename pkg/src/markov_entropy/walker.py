"""Random standard walks in a prefix tree by randomized depth-first search.

At every node the children are tried in a uniformly random order, revealed
lazily: trial ``t`` swaps a uniformly chosen untried letter into slot ``t``
(no draw when a single letter is left). The search stops as soon as level
``n`` is reached. The profile counts, for every node on the final path, the
1-based trial at which its successful child was found.

Two interchangeable engines run the same search with the same random
stream: a compiled kernel for checkers exposing ``kernel()``, and a
pure-Python loop for any object with ``sigma``, ``push`` and ``pop``.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from numba import njit

from .rng import SplitMix64, derive_seed, rng_below

_DEAD, _FORCED, _PUSHES = 0, 1, 2


class WalkError(RuntimeError):
    """The search could not reach the requested level."""


@dataclass(frozen=True)
class WalkOptions:
    rng_seed: int = 0
    record_word: bool = False
    stall_threshold: Optional[int] = None
    keep_fraction: float = 0.5

    def __post_init__(self):
        if self.stall_threshold is not None and self.stall_threshold < 1:
            raise ValueError("stall_threshold must be >= 1")
        if not 0.0 <= self.keep_fraction < 1.0:
            raise ValueError("keep_fraction must lie in [0, 1)")


@dataclass
class WalkProfile:
    r: tuple
    n: int
    seed: int
    word: Optional[tuple] = None
    forced_backtracks: int = 0
    dead_end_visits: int = 0
    pushes: int = 0
    elapsed: float = 0.0

    @property
    def sigma(self) -> int:
        return len(self.r)

    @property
    def flagged(self) -> bool:
        return self.forced_backtracks > 0


@dataclass
class WalkFailure:
    index: int
    seed: int
    message: str


@njit(nogil=True)
def _dfs_kernel(push, pop, state, sigma, n, seed, stall, keep_fraction, max_forced, perm, tried, counters):
    rs = np.empty(1, dtype=np.uint64)
    rs[0] = seed
    d = 0
    tried[0] = 0
    best = 0
    idle = 0
    while d < n:
        t = tried[d]
        if t < sigma:
            if t == 0:
                for b in range(sigma):
                    perm[d, b] = b
            rem = sigma - t
            if rem > 1:
                jj = t + rng_below(rs, rem)
                tmp = perm[d, t]
                perm[d, t] = perm[d, jj]
                perm[d, jj] = tmp
            a = perm[d, t]
            tried[d] = t + 1
            counters[_PUSHES] += 1
            if push(state, a):
                d += 1
                tried[d] = 0
                if d > best:
                    best = d
                    idle = 0
                else:
                    idle += 1
            else:
                pop(state)
                idle += 1
            if stall > 0 and idle >= stall and d > 0:
                target = min(int(best * keep_fraction), d - 1)
                while d > target:
                    pop(state)
                    d -= 1
                # the abandoned subtree was not proven dead: redraw at the landing node
                tried[d] = 0
                counters[_FORCED] += 1
                if counters[_FORCED] > max_forced:
                    return 2
                best = d
                idle = 0
        else:
            if d == 0:
                return 1
            pop(state)
            d -= 1
            counters[_DEAD] += 1
    return 0


def _max_forced(n: int) -> int:
    # forced jumps never prove a subtree dead, so a finite language could cycle forever
    return 100 * n + 10_000


def _run_kernel(oracle, n, opts):
    push, pop, state = oracle.kernel()
    sigma = oracle.sigma
    if sigma >= 1 << 11:
        raise ValueError("alphabets of 2048 letters or more are not supported")
    perm = np.zeros((max(n, 1), sigma), dtype=np.int16)
    tried = np.zeros(n + 1, dtype=np.int16)
    counters = np.zeros(3, dtype=np.int64)
    status = _dfs_kernel(
        push, pop, state, sigma, n, np.uint64(opts.rng_seed & 0xFFFFFFFFFFFFFFFF),
        opts.stall_threshold or 0, opts.keep_fraction, _max_forced(n), perm, tried, counters,
    )
    if status == 1:
        raise WalkError(f"no word of length {n} in the language")
    if status == 2:
        raise WalkError(f"gave up after {_max_forced(n)} forced backtracks")
    ranks = tried[:n].astype(np.int64)
    r = np.bincount(ranks - 1, minlength=sigma) if n else np.zeros(sigma, dtype=np.int64)
    word = None
    if opts.record_word:
        word = tuple(int(perm[d, ranks[d] - 1]) for d in range(n))
    return r, word, counters


def _run_python(oracle, n, opts):
    sigma = oracle.sigma
    rng = SplitMix64(opts.rng_seed)
    stall = opts.stall_threshold or 0
    perm = [None] * max(n, 1)
    tried = [0] * (n + 1)
    counters = [0, 0, 0]
    d = best = idle = 0
    while d < n:
        t = tried[d]
        if t < sigma:
            if t == 0:
                perm[d] = list(range(sigma))
            row = perm[d]
            rem = sigma - t
            if rem > 1:
                jj = t + rng.below(rem)
                row[t], row[jj] = row[jj], row[t]
            tried[d] = t + 1
            counters[_PUSHES] += 1
            if oracle.push(row[t]):
                d += 1
                tried[d] = 0
                if d > best:
                    best, idle = d, 0
                else:
                    idle += 1
            else:
                oracle.pop()
                idle += 1
            if stall and idle >= stall and d > 0:
                target = min(int(best * opts.keep_fraction), d - 1)
                while d > target:
                    oracle.pop()
                    d -= 1
                tried[d] = 0
                counters[_FORCED] += 1
                if counters[_FORCED] > _max_forced(n):
                    raise WalkError(f"gave up after {_max_forced(n)} forced backtracks")
                best, idle = d, 0
        else:
            if d == 0:
                raise WalkError(f"no word of length {n} in the language")
            oracle.pop()
            d -= 1
            counters[_DEAD] += 1
    r = [0] * sigma
    for d in range(n):
        r[tried[d] - 1] += 1
    word = tuple(perm[d][tried[d] - 1] for d in range(n)) if opts.record_word else None
    return r, word, counters


def random_walk(oracle, n: int, opts: WalkOptions = WalkOptions()) -> WalkProfile:
    """Build one length-``n`` random standard walk through ``oracle``.

    Parameters
    ----------
    oracle
        A fresh incremental membership checker (empty word).
    n : int
        Walk length.
    opts : WalkOptions
        Seed, forced-backtracking trigger and word recording.
    """
    if n < 0:
        raise ValueError("walk length must be non-negative")
    if len(oracle) != 0:
        raise ValueError("oracle must start from the empty word")
    capacity = getattr(oracle, "capacity", None)
    if capacity is not None and capacity < n:
        raise OverflowError(f"oracle capacity {capacity} below walk length {n}")
    start = time.perf_counter()
    if hasattr(oracle, "kernel"):
        r, word, counters = _run_kernel(oracle, n, opts)
    else:
        r, word, counters = _run_python(oracle, n, opts)
    return WalkProfile(
        r=tuple(int(x) for x in r),
        n=n,
        seed=opts.rng_seed,
        word=word,
        forced_backtracks=int(counters[_FORCED]),
        dead_end_visits=int(counters[_DEAD]),
        pushes=int(counters[_PUSHES]),
        elapsed=time.perf_counter() - start,
    )


def make_checker(language, capacity: int):
    """Fast incremental checker for a language spec or a PDFA."""
    from .abelian import AbelianChecker
    from .lang import LanguageSpec
    from .power import PowerChecker
    from .regular import Pdfa, PdfaChecker

    if isinstance(language, Pdfa):
        return PdfaChecker(language, capacity)
    if isinstance(language, LanguageSpec):
        if language.is_abelian:
            return AbelianChecker(language, capacity)
        return PowerChecker(language, max(capacity, 1))
    raise TypeError(f"cannot build a checker for {type(language).__name__}")


def default_parallelism() -> int:
    env = os.environ.get("ENTROPY_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def batch_walks(
    language,
    n: int,
    count: int,
    base_seed: int = 0,
    opts: WalkOptions = WalkOptions(),
    parallelism: Optional[int] = None,
) -> list[Union[WalkProfile, WalkFailure]]:
    """Run ``count`` independent walks; walk ``i`` uses ``derive_seed(base_seed, i)``.

    Failed walks appear as :class:`WalkFailure` at their index.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    seeds = [derive_seed(base_seed, i) for i in range(count)]

    def one(i):
        try:
            oracle = make_checker(language, n)
            walk_opts = WalkOptions(
                rng_seed=seeds[i],
                record_word=opts.record_word,
                stall_threshold=opts.stall_threshold,
                keep_fraction=opts.keep_fraction,
            )
            return random_walk(oracle, n, walk_opts)
        except (WalkError, OverflowError, MemoryError) as exc:
            return WalkFailure(i, seeds[i], str(exc))

    workers = parallelism or default_parallelism()
    if workers <= 1 or count == 1:
        return [one(i) for i in range(count)]
    # compile on the calling thread before fanning out
    first = one(0)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rest = list(pool.map(one, range(1, count)))
    return [first] + rest


def split_results(results: Sequence) -> tuple[list[WalkProfile], list[WalkFailure]]:
    profiles = [x for x in results if isinstance(x, WalkProfile)]
    failures = [x for x in results if isinstance(x, WalkFailure)]
    return profiles, failures
