"""Exhaustive n-trimmed prefix trees and their exact entropies.

A slice of depth ``n`` keeps every word of the language of length at most
``n`` that has a descendant at level ``n``. Visit probabilities are exact
fractions; they are converted to floats only inside entropy sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .lang import LanguageSpec, ends_with_forbidden, render_word
from .regular import Pdfa, count_words, general_entropy_from_count


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class TrimmedTreeSlice:
    n: int
    sigma: int
    ch: dict  # word -> number of children in the trimmed tree
    prob: dict  # word -> Fraction

    @property
    def nodes(self):
        return self.ch.keys()

    def level(self, depth: int) -> list:
        return sorted(w for w in self.ch if len(w) == depth)

    def leaves(self) -> list:
        return self.level(self.n)

    def children(self, w) -> list:
        return [w + (a,) for a in range(self.sigma) if w + (a,) in self.ch]

    def __contains__(self, w):
        return tuple(w) in self.ch


class _SpecSource:
    def __init__(self, spec: LanguageSpec):
        self.sigma = spec.sigma
        self.spec = spec

    def root(self):
        return None

    def step(self, word, key, a):
        w = word + (a,)
        return (not ends_with_forbidden(w, self.spec)), None


class _PdfaSource:
    def __init__(self, a: Pdfa):
        self.sigma = a.sigma
        self.delta = a.delta
        self.initial = a.initial

    def root(self):
        return self.initial

    def step(self, word, key, a):
        t = int(self.delta[key, a])
        return t >= 0, t


def build_slice(language: Union[LanguageSpec, Pdfa], n: int, budget: int = 10_000_000) -> TrimmedTreeSlice:
    """Enumerate the ``n``-trimmed prefix tree.

    For automata, extendability is memoized on ``(state, remaining depth)``;
    for specs every word is checked with the naive suffix oracle.
    """
    if n < 0:
        raise ValueError("depth must be non-negative")
    src = _PdfaSource(language) if isinstance(language, Pdfa) else _SpecSource(language)
    memo: dict = {}
    ch: dict = {}
    visited = 0

    def grow(word, key) -> bool:
        nonlocal visited
        visited += 1
        if visited > budget:
            raise BudgetExceeded(f"more than {budget} nodes explored")
        remaining = n - len(word)
        if remaining == 0:
            ch[word] = 0
            return True
        if key is not None and memo.get((key, remaining)) is False:
            return False
        count = 0
        for a in range(src.sigma):
            ok, child_key = src.step(word, key, a)
            if ok and grow(word + (a,), child_key):
                count += 1
        if key is not None:
            memo[(key, remaining)] = count > 0
        if count:
            ch[word] = count
        return count > 0

    grow((), src.root())
    prob = {}
    for w in sorted(ch, key=len):
        prob[w] = Fraction(1) if not w else prob[w[:-1]] / ch[w[:-1]]
    return TrimmedTreeSlice(n, src.sigma, ch, prob)


def visit_probability(tree: TrimmedTreeSlice, w: Sequence[int]) -> Fraction:
    """Product of inverse child counts along the path to ``w`` (0 if absent)."""
    w = tuple(w)
    if w not in tree.ch:
        return Fraction(0)
    p = Fraction(1)
    for i in range(len(w)):
        p /= tree.ch[w[:i]]
    return p


def _log2_fraction(p: Fraction) -> float:
    return math.log2(p.numerator) - math.log2(p.denominator)


def exact_mu_n(tree: TrimmedTreeSlice) -> float:
    """Order-n Markov entropy: entropy of the level-n visit distribution over n."""
    if tree.n == 0:
        return 0.0
    terms = []
    for w in tree.leaves():
        p = tree.prob[w]
        terms.append(-float(p) * _log2_fraction(p))
    return math.fsum(terms) / tree.n


def exact_expected_bf(tree: TrimmedTreeSlice) -> float:
    """Expected branching frequency of a random length-n walk in the trimmed tree."""
    if tree.n == 0:
        return 0.0
    terms = []
    for w in tree.leaves():
        weight = math.fsum(math.log2(tree.ch[w[:i]]) for i in range(tree.n))
        terms.append(float(tree.prob[w]) * weight / tree.n)
    return math.fsum(terms)


def level_count(tree: TrimmedTreeSlice) -> int:
    return len(tree.leaves())


def general_entropy_order_n(language_or_tree, n: Optional[int] = None) -> float:
    """``log2(C(n)) / n`` from the number of level-n nodes.

    Automata are counted by exact transfer-matrix products instead of
    enumerating the tree.
    """
    tree = language_or_tree
    if isinstance(tree, Pdfa):
        return general_entropy_from_count(count_words(tree, n), n)
    if not isinstance(tree, TrimmedTreeSlice):
        tree = build_slice(language_or_tree, n)
    count = level_count(tree)
    if tree.n == 0:
        return 0.0
    return math.log2(count) / tree.n if count else -math.inf


def dump_slice(tree: TrimmedTreeSlice) -> str:
    """Tab-separated ``node  ch  P`` lines, shortlex order; the root prints as ``λ``."""
    lines = ["node\tch\tP"]
    for w in sorted(tree.ch, key=lambda w: (len(w), w)):
        lines.append(f"{render_word(w) or 'λ'}\t{tree.ch[w]}\t{tree.prob[w]}")
    return "\n".join(lines) + "\n"
