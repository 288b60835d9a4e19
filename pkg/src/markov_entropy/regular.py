"""Partial DFAs for factorial regular languages and their entropies.

Every state of a :class:`Pdfa` is final, so an automaton accepts exactly
the words it can read. Analyses work on a sparse adjacency view and never
form dense matrices.
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from numba import njit
from scipy.sparse.csgraph import connected_components

from .lang import LanguageSpec, SpecError, ends_with_forbidden_power_naive, forbidden_power_length


class PdfaError(ValueError):
    """Malformed automaton description."""


class FiniteLanguageError(ValueError):
    """Trimming removed every state: the language is finite."""


class StateBudgetExceeded(RuntimeError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Pdfa:
    """Deterministic automaton with partial transitions; ``delta[s, a] = -1`` if undefined."""

    delta: np.ndarray
    initial: int = 0

    def __post_init__(self):
        self.delta.setflags(write=False)

    @property
    def sigma(self) -> int:
        return self.delta.shape[1]

    @property
    def n_states(self) -> int:
        return self.delta.shape[0]

    @property
    def out_degree(self) -> np.ndarray:
        return (self.delta >= 0).sum(axis=1)

    def edges(self) -> Iterable[tuple[int, int, int]]:
        src, letter = np.nonzero(self.delta >= 0)
        for s, a in zip(src.tolist(), letter.tolist()):
            yield s, a, int(self.delta[s, a])

    def read(self, word: Sequence[int], state: Optional[int] = None) -> int:
        """State reached by reading ``word``; -1 if the word is rejected."""
        q = self.initial if state is None else state
        for a in word:
            q = int(self.delta[q, a])
            if q < 0:
                return -1
        return q

    def accepts(self, word: Sequence[int]) -> bool:
        return self.read(word) >= 0

    def adjacency(self) -> sp.csr_matrix:
        """Adjacency matrix; entry ``(s, t)`` counts the letters leading from s to t."""
        src, letter = np.nonzero(self.delta >= 0)
        dst = self.delta[src, letter]
        m = self.n_states
        return sp.csr_matrix((np.ones(len(src)), (src, dst)), shape=(m, m))

    def __eq__(self, other):
        if not isinstance(other, Pdfa):
            return NotImplemented
        return self.initial == other.initial and np.array_equal(self.delta, other.delta)


def _canonical(delta: np.ndarray, initial: int, keep: Optional[np.ndarray] = None) -> Pdfa:
    """Renumber the states reachable from ``initial`` in BFS order (letters ascending)."""
    m, sigma = delta.shape
    order = {initial: 0}
    queue = deque([initial])
    rows = []
    while queue:
        s = queue.popleft()
        row = []
        for a in range(sigma):
            t = int(delta[s, a])
            if t >= 0 and (keep is None or keep[t]):
                if t not in order:
                    order[t] = len(order)
                    queue.append(t)
                row.append(order[t])
            else:
                row.append(-1)
        rows.append(row)
    return Pdfa(np.array(rows, dtype=np.int32).reshape(len(rows), sigma), 0)


def pdfa_from_edges(sigma: int, edges: Iterable[tuple[int, int, int]], initial, n_states: Optional[int] = None) -> Pdfa:
    """Validated automaton from ``(src, letter, dst)`` triples with arbitrary state labels.

    Raises :class:`PdfaError` on nondeterminism, letters outside the
    alphabet, or states unreachable from ``initial``.
    """
    labels = {initial: 0}
    trans = {}
    for src, a, dst in edges:
        if not 0 <= a < sigma:
            raise PdfaError(f"letter {a} outside alphabet of size {sigma}")
        for q in (src, dst):
            labels.setdefault(q, len(labels))
        key = (labels[src], a)
        if key in trans and trans[key] != labels[dst]:
            raise PdfaError(f"nondeterministic transitions from state {src} on letter {a}")
        trans[key] = labels[dst]
    if n_states is not None and n_states != len(labels):
        if n_states < len(labels):
            raise PdfaError(f"declared {n_states} states but the listing uses {len(labels)}")
        raise PdfaError(f"{n_states - len(labels)} declared states never occur and are unreachable")
    delta = np.full((len(labels), sigma), -1, dtype=np.int32)
    for (s, a), t in trans.items():
        delta[s, a] = t
    result = _canonical(delta, 0)
    if result.n_states != len(labels):
        raise PdfaError(f"{len(labels) - result.n_states} states unreachable from the initial state")
    return result


_HEADER = re.compile(r"^pdfa\s+(?:σ|sigma)=(\d+)\s+states=(\d+)\s+initial=(\S+)\s*$")


def parse_pdfa(text: str) -> Pdfa:
    """Parse the line format ``pdfa σ=<int> states=<int> initial=<id>`` + ``src letter dst`` lines.

    Blank lines and ``#`` comments are ignored.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise PdfaError("empty automaton description")
    m = _HEADER.match(lines[0])
    if not m:
        raise PdfaError(f"bad header line {lines[0]!r}")
    sigma, n_states, initial = int(m.group(1)), int(m.group(2)), int(m.group(3))
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise PdfaError(f"bad transition line {ln!r}")
        try:
            edges.append(tuple(int(x) for x in parts))
        except ValueError:
            raise PdfaError(f"bad transition line {ln!r}") from None
    return pdfa_from_edges(sigma, edges, initial, n_states)


def load_pdfa(path) -> Pdfa:
    with open(path, encoding="utf-8") as fh:
        return parse_pdfa(fh.read())


def dump_pdfa(a: Pdfa) -> str:
    """Deterministic serialization (BFS state order, transitions sorted)."""
    a = _canonical(np.asarray(a.delta), a.initial)
    out = [f"pdfa σ={a.sigma} states={a.n_states} initial=0"]
    out.extend(f"{s} {letter} {t}" for s, letter, t in a.edges())
    return "\n".join(out) + "\n"


def build_power_approx_pdfa(spec: LanguageSpec, state_cap: int = 5_000_000) -> Pdfa:
    """Automaton for words avoiding the forbidden powers of period at most ``spec.period_bound``.

    States are the suffixes of length at most ``m = forbidden_power_length(bound) - 1``
    of accepted words; appending a letter is checked on the last ``m+1`` letters.
    """
    if spec.is_abelian or spec.period_bound is None:
        raise SpecError("need a power-free spec with a period bound")
    m = forbidden_power_length(spec.power, spec.period_bound) - 1
    index = {(): 0}
    queue = deque([()])
    rows = []
    while queue:
        s = queue.popleft()
        row = [-1] * spec.sigma
        for a in range(spec.sigma):
            w = s + (a,)
            if ends_with_forbidden_power_naive(w, spec) is not None:
                continue
            t = w[-m:] if len(w) > m else w
            if t not in index:
                if len(index) >= state_cap:
                    raise StateBudgetExceeded(f"more than {state_cap} states for {spec}")
                index[t] = len(index)
                queue.append(t)
            row[a] = index[t]
        rows.append(row)
    return Pdfa(np.array(rows, dtype=np.int32).reshape(len(rows), spec.sigma), 0)


def _components(a: Pdfa):
    n_comp, labels = connected_components(a.adjacency(), directed=True, connection="strong")
    return n_comp, labels


def _cyclic_components(a: Pdfa, n_comp, labels) -> np.ndarray:
    sizes = np.bincount(labels, minlength=n_comp)
    cyclic = sizes > 1
    for s, _, t in a.edges():
        if s == t:
            cyclic[labels[s]] = True
    return cyclic


def trim_to_re(a: Pdfa) -> Pdfa:
    """Drop the states from which no cycle is reachable.

    The result accepts exactly the right-extendable words of the language.
    Raises :class:`FiniteLanguageError` if nothing is left.
    """
    n_comp, labels = _components(a)
    cyclic = _cyclic_components(a, n_comp, labels)
    keep = cyclic[labels].copy()
    reverse = [[] for _ in range(a.n_states)]
    for s, _, t in a.edges():
        reverse[t].append(s)
    queue = deque(np.nonzero(keep)[0].tolist())
    while queue:
        t = queue.popleft()
        for s in reverse[t]:
            if not keep[s]:
                keep[s] = True
                queue.append(s)
    if not keep[a.initial]:
        raise FiniteLanguageError("no cycle is reachable: the language is finite")
    return _canonical(np.asarray(a.delta), a.initial, keep)


@dataclass(frozen=True)
class GrowthResult:
    gr: float
    delta: float
    H: float
    iterations: int = 0


def _perron_bounds(block: sp.csr_matrix, delta: float, max_iter: int):
    """Collatz-Wielandt bracket of the Perron root of an irreducible block.

    Iterates ``x <- x (B + I)``; the shift makes the iteration converge
    on periodic blocks as well.
    """
    m = block.shape[0]
    shifted = (block + sp.identity(m, format="csr")).T.tocsr()
    x = np.ones(m)
    lo, hi = 0.0, math.inf
    for it in range(1, max_iter + 1):
        y = shifted @ x
        ratios = y / x
        lo, hi = ratios.min(), ratios.max()
        if hi - lo <= 2 * delta:
            return lo - 1.0, hi - 1.0, it
        x = y / y.sum()
    raise ConvergenceError(f"growth rate did not converge in {max_iter} iterations (gap {hi - lo:.3g})")


def growth_rate(a: Pdfa, delta: float = 1e-9, max_iter: int = 10_000_000) -> GrowthResult:
    """Principal eigenvalue of the adjacency matrix, within ``delta``.

    The spectral radius is the maximum over strongly connected components
    with a cycle; each component is bracketed separately.
    """
    n_comp, labels = _components(a)
    cyclic = _cyclic_components(a, n_comp, labels)
    if not cyclic.any():
        return GrowthResult(0.0, 0.0, -math.inf)
    adj = a.adjacency()
    best, err, iters = 0.0, 0.0, 0
    for c in np.nonzero(cyclic)[0]:
        idx = np.nonzero(labels == c)[0]
        lo, hi, it = _perron_bounds(adj[idx][:, idx].tocsr(), delta, max_iter)
        iters += it
        mid = 0.5 * (lo + hi)
        if mid > best:
            best = mid
        err = max(err, 0.5 * (hi - lo))
    return GrowthResult(best, err, math.log2(best), iters)


def _component_period(a: Pdfa, members: np.ndarray, labels, comp) -> int:
    root = int(members[0])
    level = {root: 0}
    queue = deque([root])
    g = 0
    while queue:
        s = queue.popleft()
        for t in a.delta[s]:
            t = int(t)
            if t < 0 or labels[t] != comp:
                continue
            if t not in level:
                level[t] = level[s] + 1
                queue.append(t)
            else:
                g = math.gcd(g, level[s] + 1 - level[t])
    return g or 1


def chain_period(a: Pdfa) -> int:
    """Least common multiple of the periods of the closed components."""
    n_comp, labels = _components(a)
    leaves = np.ones(n_comp, dtype=bool)
    for s, _, t in a.edges():
        if labels[s] != labels[t]:
            leaves[labels[s]] = False
    h = 1
    for c in np.nonzero(leaves)[0]:
        members = np.nonzero(labels == c)[0]
        h = math.lcm(h, _component_period(a, members, labels, c))
    return h


@dataclass(frozen=True)
class StationaryResult:
    p: np.ndarray
    residual: float
    iterations: int
    h: int


def stochastic_matrix(a: Pdfa) -> sp.csr_matrix:
    adj = a.adjacency()
    deg = np.asarray(adj.sum(axis=1)).ravel()
    if (deg == 0).any():
        raise PdfaError("state with out-degree 0; trim the automaton first")
    return sp.diags(1.0 / deg) @ adj


def stationary_distribution(a: Pdfa, delta: float = 1e-9, max_iter: int = 10_000_000) -> StationaryResult:
    """Stationary distribution of the random walk started at the initial state.

    Iterates ``p <- p A`` from the unit vector on the initial state and
    averages over windows of ``h`` steps, ``h`` being the period of the
    closed components, until the averaged vector moves by at most
    ``delta`` in max-norm.
    """
    step = stochastic_matrix(a).T.tocsr()
    h = chain_period(a)
    m = a.n_states
    p = np.zeros(m)
    p[a.initial] = 1.0
    window = deque([p])
    for _ in range(h - 1):
        window.append(step @ window[-1])
    total = np.sum(window, axis=0)
    for it in range(1, max_iter + 1):
        nxt = step @ window[-1]
        oldest = window.popleft()
        diff = nxt - oldest
        total += diff
        window.append(nxt)
        residual = np.abs(diff).max() / h
        if residual <= delta:
            q = total / h
            q /= q.sum()
            return StationaryResult(q, float(residual), it, h)
    raise ConvergenceError(f"stationary distribution did not converge in {max_iter} iterations")


def markov_entropy_regular(a: Pdfa, delta: float = 1e-9) -> float:
    """Markov entropy in bits per letter: ``sum p_i log2 outdeg(i)`` over the trimmed automaton."""
    trimmed = trim_to_re(a)
    st = stationary_distribution(trimmed, delta)
    return float(np.dot(st.p, np.log2(trimmed.out_degree)))


def count_sequence(a: Pdfa, n_max: int) -> list[int]:
    """Exact word counts ``C(0), ..., C(n_max)``."""
    edges = list(a.edges())
    cur = [0] * a.n_states
    cur[a.initial] = 1
    out = [1]
    for _ in range(n_max):
        nxt = [0] * a.n_states
        for s, _, t in edges:
            if cur[s]:
                nxt[t] += cur[s]
        cur = nxt
        out.append(sum(cur))
    return out


def count_words(a: Pdfa, n: int) -> int:
    if n < 0:
        raise ValueError("length must be non-negative")
    return count_sequence(a, n)[n]


def general_entropy_from_count(count: int, n: int) -> float:
    """``log2(C(n)) / n``, exact for arbitrarily large counts."""
    if n == 0 or count <= 1:
        return 0.0 if count >= 1 else -math.inf
    return math.log2(count) / n


def minimize(a: Pdfa) -> Pdfa:
    """Moore partition refinement; missing transitions lead to an implicit sink."""
    delta = np.asarray(a.delta)
    cls = np.zeros(a.n_states, dtype=np.int64)
    n_cls = 1
    while True:
        succ = np.where(delta >= 0, cls[np.maximum(delta, 0)], -1)
        sig = np.column_stack([cls, succ])
        _, new = np.unique(sig, axis=0, return_inverse=True)
        new = new.ravel()
        n_new = int(new.max()) + 1
        cls = new
        if n_new == n_cls:
            break
        n_cls = n_new
    quotient = np.full((n_cls, a.sigma), -1, dtype=np.int32)
    for s in range(a.n_states):
        row = delta[s]
        quotient[cls[s]] = np.where(row >= 0, cls[np.maximum(row, 0)], -1)
    return _canonical(quotient, int(cls[a.initial]))


@dataclass(frozen=True)
class RegularReport:
    states: int
    trimmed_states: int
    gr: float
    gr_error: float
    H: float
    mu: float
    residual: float
    iterations: int
    h: int

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def analyze_regular(a: Pdfa, delta: float = 1e-9, minimized: bool = False) -> RegularReport:
    if minimized:
        a = minimize(a)
    trimmed = trim_to_re(a)
    g = growth_rate(a, delta)
    st = stationary_distribution(trimmed, delta)
    mu = float(np.dot(st.p, np.log2(trimmed.out_degree)))
    return RegularReport(a.n_states, trimmed.n_states, g.gr, g.delta, g.H, mu, st.residual, st.iterations, st.h)


@dataclass
class SweepRow:
    k: int
    states: int
    trimmed_states: int
    gr: float
    H: float
    mu: float


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)
    complete: bool = True
    message: str = ""


def approximation_sweep(spec: LanguageSpec, bounds: Iterable[int], delta: float = 1e-9,
                        state_cap: int = 5_000_000) -> SweepResult:
    """Entropies of the period-bounded approximations of ``spec``; stops at the first budget overflow."""
    result = SweepResult()
    for k in bounds:
        try:
            a = build_power_approx_pdfa(spec.with_period_bound(k), state_cap)
        except StateBudgetExceeded as exc:
            result.complete = False
            result.message = str(exc)
            break
        rep = analyze_regular(a, delta)
        result.rows.append(SweepRow(k, rep.states, rep.trimmed_states, rep.gr, rep.H, rep.mu))
    return result


def sf_k_study(k_max: int, delta: float = 1e-9, state_cap: int = 5_000_000) -> SweepResult:
    """Table of (k, states, gr, H, mu) for the ternary square-free approximations SF_1..SF_k_max."""
    from .lang import parse_language_spec

    return approximation_sweep(parse_language_spec("pf:3:2"), range(1, k_max + 1), delta, state_cap)


@njit(nogil=True, cache=True)
def pdfa_push(state, a):
    delta, stack, meta = state
    n = meta[0]
    s = stack[n]
    t = delta[s, a] if s >= 0 else -1
    meta[0] = n + 1
    meta[1] += 1
    stack[n + 1] = t
    return t >= 0


@njit(nogil=True, cache=True)
def pdfa_pop(state):
    state[2][0] -= 1


class PdfaChecker:
    """Push/pop membership oracle over a PDFA (a stack of visited states)."""

    def __init__(self, a: Pdfa, capacity: int):
        self.pdfa = a
        self.sigma = a.sigma
        self.capacity = capacity
        stack = np.zeros(capacity + 1, dtype=np.int32)
        stack[0] = a.initial
        self._state = (np.ascontiguousarray(a.delta, dtype=np.int32), stack, np.zeros(2, dtype=np.int64))
        self._pending = False

    def __len__(self):
        return int(self._state[2][0])

    @property
    def state(self) -> int:
        return int(self._state[1][len(self)])

    def push(self, a: int) -> bool:
        if self._pending:
            raise RuntimeError("pop the rejected letter before pushing again")
        if len(self) >= self.capacity:
            raise OverflowError(f"capacity {self.capacity} exceeded")
        ok = bool(pdfa_push(self._state, a))
        self._pending = not ok
        return ok

    def pop(self) -> None:
        if len(self) == 0:
            raise IndexError("pop from empty word")
        pdfa_pop(self._state)
        self._pending = False

    def kernel(self):
        return pdfa_push, pdfa_pop, self._state
