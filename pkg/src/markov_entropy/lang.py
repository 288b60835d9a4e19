"""Words, language specifications and naive membership oracles.

Letters are the integers ``0..sigma-1`` and words are tuples of letters.
The checkers here are quadratic and exist to be obviously correct; the
incremental detectors in :mod:`markov_entropy.power` and
:mod:`markov_entropy.abelian` are tested against them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

Word = tuple

_ALPHABET = "0123456789abcdefghijklmnopqrstuvwxyz"


class SpecError(ValueError):
    """Raised for malformed or invalid language specifications."""


@dataclass(frozen=True)
class PowerSpec:
    kind: str  # "power" or "abelian"
    beta: Fraction = Fraction(2)
    plus: bool = False
    k: int = 2

    def __post_init__(self):
        if self.kind == "power":
            if self.beta <= 1:
                raise SpecError(f"exponent must exceed 1, got {self.beta}")
        elif self.kind == "abelian":
            if self.k < 2:
                raise SpecError(f"abelian power must be at least 2, got {self.k}")
        else:
            raise SpecError(f"unknown power kind {self.kind!r}")


@dataclass(frozen=True)
class LanguageSpec:
    sigma: int
    power: PowerSpec
    period_bound: Optional[int] = None

    def __post_init__(self):
        if self.sigma < 2:
            raise SpecError(f"alphabet must have at least 2 letters, got {self.sigma}")
        if self.period_bound is not None:
            if self.power.kind == "abelian":
                raise SpecError("period bounds apply to power-free languages only")
            if self.period_bound < 1:
                raise SpecError(f"period bound must be >= 1, got {self.period_bound}")

    @property
    def is_abelian(self) -> bool:
        return self.power.kind == "abelian"

    def with_period_bound(self, bound: Optional[int]) -> "LanguageSpec":
        return LanguageSpec(self.sigma, self.power, bound)

    def __str__(self) -> str:
        if self.is_abelian:
            return f"apf:{self.sigma}:{self.power.k}"
        beta = self.power.beta
        text = f"pf:{self.sigma}:{beta.numerator}"
        if beta.denominator != 1:
            text += f"/{beta.denominator}"
        if self.power.plus:
            text += "+"
        if self.period_bound is not None:
            text += f":b={self.period_bound}"
        return text


_PF_RE = re.compile(r"^pf:(\d+):(\d+)(?:/(\d+))?(\+)?(?::b=(\d+))?$")
_APF_RE = re.compile(r"^apf:(\d+):(\d+)$")
_SWEEP_RE = re.compile(r"^(pf:\d+:\d+(?:/\d+)?\+?):b=(\d+)\.\.(\d+)$")


def parse_language_spec(text: str) -> LanguageSpec:
    """Parse ``pf:<sigma>:<p>[/<q>][+][:b=<bound>]`` or ``apf:<sigma>:<k>``.

    >>> str(parse_language_spec("pf:2:7/3+"))
    'pf:2:7/3+'
    """
    text = text.strip()
    m = _PF_RE.match(text)
    if m:
        sigma, num, den, plus, bound = m.groups()
        if den is not None and int(den) == 0:
            raise SpecError(f"zero denominator in {text!r}")
        beta = Fraction(int(num), int(den) if den else 1)
        return LanguageSpec(
            int(sigma),
            PowerSpec("power", beta=beta, plus=plus is not None),
            int(bound) if bound is not None else None,
        )
    m = _APF_RE.match(text)
    if m:
        sigma, k = m.groups()
        return LanguageSpec(int(sigma), PowerSpec("abelian", k=int(k)))
    raise SpecError(f"malformed language spec {text!r}")


def parse_language_sweep(text: str) -> list[LanguageSpec]:
    """Expand ``pf:...:b=<lo>..<hi>`` into one spec per period bound."""
    m = _SWEEP_RE.match(text.strip())
    if not m:
        return [parse_language_spec(text)]
    base, lo, hi = m.group(1), int(m.group(2)), int(m.group(3))
    if lo > hi:
        raise SpecError(f"empty sweep range in {text!r}")
    return [parse_language_spec(f"{base}:b={b}") for b in range(lo, hi + 1)]


def forbidden_power_length(power: PowerSpec, p: int) -> int:
    """Length of the shortest forbidden repetition with period ``p``.

    ``ceil(beta*p)`` for beta-powers and ``floor(beta*p + 1)`` for
    beta+-powers, evaluated in integer arithmetic.
    """
    if p < 1:
        raise ValueError("period must be positive")
    num, den = power.beta.numerator, power.beta.denominator
    if power.plus:
        return (num * p) // den + 1
    return -((-num * p) // den)


def has_period(s: Sequence[int], p: int) -> bool:
    """True iff ``s[1..|s|-p] == s[p+1..|s|]``."""
    return all(s[t] == s[t + p] for t in range(len(s) - p))


def ends_with_forbidden_power_naive(w: Sequence[int], spec: LanguageSpec) -> Optional[int]:
    """Smallest period of a forbidden power that is a suffix of ``w``."""
    if spec.is_abelian:
        raise SpecError("use ends_with_abelian_power_naive for abelian specs")
    n = len(w)
    p = 1
    while True:
        if spec.period_bound is not None and p > spec.period_bound:
            return None
        length = forbidden_power_length(spec.power, p)
        if length > n:
            return None
        if has_period(w[n - length:], p):
            return p
        p += 1


def parikh_vector(w: Sequence[int], sigma: int) -> tuple[int, ...]:
    counts = [0] * sigma
    for a in w:
        counts[a] += 1
    return tuple(counts)


def ends_with_abelian_power_naive(w: Sequence[int], k: int, sigma: Optional[int] = None) -> Optional[int]:
    """Smallest block length ``i`` such that ``w`` ends with an Abelian k-power of blocks of length ``i``."""
    if k < 2:
        raise SpecError("abelian power must be at least 2")
    if sigma is None:
        sigma = max(w, default=0) + 1
    n = len(w)
    # tail[t] is the Parikh vector of the last t letters
    tail = [(0,) * sigma]
    for a in reversed(w):
        v = list(tail[-1])
        v[a] += 1
        tail.append(tuple(v))
    for i in range(1, n // k + 1):
        first = tuple(x - y for x, y in zip(tail[i], tail[0]))
        if all(tuple(x - y for x, y in zip(tail[(t + 1) * i], tail[t * i])) == first for t in range(1, k)):
            return i
    return None


def ends_with_forbidden(w: Sequence[int], spec: LanguageSpec) -> bool:
    if spec.is_abelian:
        return ends_with_abelian_power_naive(w, spec.power.k, spec.sigma) is not None
    return ends_with_forbidden_power_naive(w, spec) is not None


def is_member(w: Sequence[int], spec: LanguageSpec) -> bool:
    """Membership by checking every prefix for a forbidden suffix."""
    if any(not 0 <= a < spec.sigma for a in w):
        return False
    return not any(ends_with_forbidden(w[:j], spec) for j in range(1, len(w) + 1))


class NaiveChecker:
    """Push/pop membership oracle backed by the naive suffix checks.

    Usable wherever an incremental checker is expected (walker, tree
    enumeration); quadratic per push.
    """

    def __init__(self, spec: LanguageSpec):
        self.spec = spec
        self.sigma = spec.sigma
        self._word: list[int] = []
        self._bad = False

    def __len__(self):
        return len(self._word)

    @property
    def word(self) -> Word:
        return tuple(self._word)

    def push(self, a: int) -> bool:
        if self._bad:
            raise RuntimeError("pop the rejected letter before pushing again")
        if not 0 <= a < self.sigma:
            raise ValueError(f"letter {a} outside alphabet of size {self.sigma}")
        self._word.append(a)
        self._bad = ends_with_forbidden(self._word, self.spec)
        return not self._bad

    def pop(self) -> None:
        if not self._word:
            raise IndexError("pop from empty word")
        self._word.pop()
        self._bad = False


def factor(w: Sequence[int], i: int, j: int) -> Word:
    """The factor ``w[i..j]`` in 1-based inclusive notation; empty if j < i."""
    if j < i:
        return ()
    return tuple(w[i - 1:j])


def render_word(w: Sequence[int]) -> str:
    return "".join(_ALPHABET[a] for a in w)


def parse_word(text: str) -> Word:
    try:
        return tuple(_ALPHABET.index(ch) for ch in text)
    except ValueError:
        raise ValueError(f"invalid letter in word {text!r}") from None
