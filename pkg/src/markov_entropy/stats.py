"""From DFS profiles to branching-frequency estimates and batch summaries.

A node with ``i`` children in the trimmed tree contributes to rank ``k``
with probability ``C(s-i, k-1)/C(s, k-1) - C(s-i, k)/C(s, k)`` (``s`` the
alphabet size): the first ``k-1`` tries hit dead letters, the ``k``-th does
not. Expected child-count tallies ``c`` solve ``c P = r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from statistics import NormalDist
from typing import Sequence

import numpy as np


@lru_cache(maxsize=None)
def profile_matrix_exact(sigma: int) -> tuple:
    if sigma < 2:
        raise ValueError("alphabet must have at least 2 letters")
    rows = []
    for i in range(1, sigma + 1):
        row = []
        for k in range(1, sigma + 1):
            first = Fraction(math.comb(sigma - i, k - 1), math.comb(sigma, k - 1))
            second = Fraction(math.comb(sigma - i, k), math.comb(sigma, k))
            row.append(first - second)
        rows.append(tuple(row))
    return tuple(rows)


def profile_matrix(sigma: int) -> np.ndarray:
    """Rank-probability matrix ``P[i-1, k-1]`` for nodes with ``i`` children."""
    return np.array([[float(x) for x in row] for row in profile_matrix_exact(sigma)])


def expected_counts(r: Sequence[float], exact: bool = False) -> np.ndarray:
    """Solve ``c P = r``.

    Row ``i`` of ``P`` vanishes beyond column ``sigma - i + 1``, so the
    system is solved from the last rank backwards. ``exact=True`` keeps
    fractions throughout and returns an object array.
    """
    sigma = len(r)
    if sigma < 2:
        raise ValueError("profile needs at least 2 ranks")
    if any(x < 0 for x in r) or sum(r) <= 0:
        raise ValueError("profile entries must be non-negative with a positive sum")
    P = profile_matrix_exact(sigma)
    if not exact:
        P = [[float(x) for x in row] for row in P]
    c = [Fraction(0) if exact else 0.0] * sigma
    # column k (1-based) involves c_1 .. c_{sigma-k+1}; it determines c_{sigma-k+1}
    for k in range(sigma, 0, -1):
        i = sigma - k + 1
        acc = Fraction(r[k - 1]) if exact else float(r[k - 1])
        for j in range(1, i):
            acc -= c[j - 1] * P[j - 1][k - 1]
        pivot = P[i - 1][k - 1]
        if pivot == 0:
            raise ArithmeticError("singular profile system")
        c[i - 1] = acc / pivot
    return np.array(c, dtype=object if exact else float)


@dataclass(frozen=True)
class BfEstimate:
    c: np.ndarray
    bf: float
    n: int
    flagged: bool = False

    @property
    def has_negative_counts(self) -> bool:
        return bool((np.asarray(self.c, dtype=float) < 0).any())


def bf_from_profile(r: Sequence[float], flagged: bool = False) -> BfEstimate:
    """Expected branching frequency ``sum c_i log2(i) / sum r`` of a walk with profile ``r``.

    Negative tallies from sampling noise are kept as they are.
    """
    c = expected_counts(r)
    n = sum(r)
    bf = math.fsum(c[i] * math.log2(i + 1) for i in range(1, len(c))) / n
    return BfEstimate(c, bf, int(n), flagged)


def walk_bf(profile) -> float:
    if profile.n <= 0:
        raise ValueError("zero-length profile")
    return bf_from_profile(profile.r).bf


Z99 = NormalDist().inv_cdf(0.995)


@dataclass(frozen=True)
class BatchSummary:
    count: int
    mean_bf: float
    stdev: float
    ci99_low: float
    ci99_high: float
    mean_2_pow_bf: float
    flagged_count: int

    @property
    def standard_error(self) -> float:
        return self.stdev / math.sqrt(self.count)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def aggregate(estimates: Sequence[BfEstimate]) -> BatchSummary:
    """Mean, sample deviation and normal 99% interval over unflagged estimates."""
    kept = [e.bf for e in estimates if not e.flagged]
    flagged = len(estimates) - len(kept)
    if len(kept) < 2:
        raise ValueError(f"need at least 2 unflagged estimates, got {len(kept)}")
    arr = np.array(kept)
    mean = float(arr.mean())
    stdev = float(arr.std(ddof=1))
    half = Z99 * stdev / math.sqrt(len(kept))
    return BatchSummary(len(kept), mean, stdev, mean - half, mean + half, growth_lower_bound(mean), flagged)


def growth_lower_bound(mean_bf: float) -> float:
    if mean_bf < 0:
        raise ValueError("branching frequency must be non-negative")
    return 2.0 ** mean_bf


@dataclass(frozen=True)
class BinomialDiagnostic:
    z: np.ndarray
    c1: float
    skipped: int

    @property
    def mean(self) -> float:
        return float(self.z.mean())

    @property
    def variance(self) -> float:
        return float(self.z.var(ddof=1))


def binomial_diagnostic(profiles, c1: float | None = None) -> BinomialDiagnostic:
    """Standardized second-rank counts ``(r2 - c1/2) / sqrt(c1/4)`` for binary profiles.

    ``c1`` (the number of single-child nodes per walk) defaults to the
    solution of the profile system for the batch-mean profile. If every
    walk has the same branching frequency, ``r2`` is binomial ``B(c1, 1/2)``
    and the z-values should look standard normal.
    """
    rs = np.array([p.r if hasattr(p, "r") else p for p in profiles], dtype=float)
    if rs.ndim != 2 or rs.shape[1] != 2:
        raise ValueError("binomial diagnostic needs binary profiles")
    if c1 is None:
        c1 = float(expected_counts(rs.mean(axis=0))[0])
    if c1 <= 0:
        return BinomialDiagnostic(np.array([]), c1, len(rs))
    z = (rs[:, 1] - c1 / 2) / math.sqrt(c1 / 4)
    return BinomialDiagnostic(z, c1, 0)
