import pytest
from hypothesis import given, settings, strategies as st

from markov_entropy.abelian import AbelianChecker, abelian_push
from markov_entropy.lang import NaiveChecker, ends_with_abelian_power_naive, parikh_vector, parse_language_spec, parse_word
from markov_entropy.walker import WalkOptions, random_walk

import oracles


def _load(spec_text, word, capacity=64, trace=0):
    chk = AbelianChecker(parse_language_spec(spec_text), capacity, trace)
    for a in parse_word(word):
        assert chk.push(a)
    return chk


def _raw(spec_text, word, capacity=64):
    """Index a word without membership checks, so non-members can be scanned."""
    chk = AbelianChecker(parse_language_spec(spec_text), capacity)
    for a in parse_word(word):
        abelian_push(chk._state, a)
    return chk


def test_abelian_square_examples():
    assert _raw("apf:3:2", "0110").scan() == 2  # ab|ba
    chk = _load("apf:3:2", "01")
    assert chk.push(2)
    chk = _load("apf:3:2", "01202")
    assert not chk.push(1)  # 012|021
    assert chk.scan() == 3


def test_scan_reports_shortest_block_or_none():
    assert _raw("apf:3:2", "0110").scan() == 2
    assert _raw("apf:3:2", "0120").scan() is None
    assert _raw("apf:3:3", "000").scan() == 1
    assert _raw("apf:3:2", "012").scan() is None


def test_rejection_at_the_square_letter():
    chk = AbelianChecker(parse_language_spec("apf:2:2"), 8)
    assert chk.push(0) and chk.push(1)
    assert not chk.push(1)


def test_scan_after_counts_matches_naive():
    chk = _load("apf:3:3", "0102", trace=32)
    assert chk.scan() == ends_with_abelian_power_naive(parse_word("0102"), 3, 3)


def test_round_trip_and_pending_guard():
    chk = _load("apf:3:3", "0012")
    assert chk.push(2)
    chk.pop()
    assert chk.word == parse_word("0012")
    assert chk.push(1)
    chk = _load("apf:3:2", "0")
    assert not chk.push(0)
    with pytest.raises(RuntimeError):
        chk.push(1)
    chk.pop()
    assert chk.push(1)


def test_first_push_examines_one_candidate():
    chk = AbelianChecker(parse_language_spec("apf:4:2"), 8)
    chk.push(0)
    assert chk.average_suffix_checks() == 1.0


@pytest.mark.parametrize("spec_text, depth", [("apf:2:3", 12), ("apf:3:2", 10), ("apf:3:3", 9), ("apf:4:2", 8), ("apf:2:4", 12)])
def test_exhaustive_short_words(spec_text, depth):
    spec = parse_language_spec(spec_text)
    checked, bad = oracles.exhaustive_agreement(
        lambda: AbelianChecker(spec, depth), lambda: NaiveChecker(spec), spec.sigma, depth)
    assert checked > 0 and bad == []


@pytest.mark.parametrize("spec_text", ["apf:2:4", "apf:3:3", "apf:4:2", "apf:3:4", "apf:5:2"])
def test_random_push_pop_matches_naive(spec_text):
    spec = parse_language_spec(spec_text)
    _, bad = oracles.random_agreement(
        AbelianChecker(spec, 120), NaiveChecker(spec), spec.sigma, 3000, seed=3, capacity=120)
    assert bad == 0


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["apf:2:3", "apf:2:4", "apf:3:3", "apf:4:2", "apf:3:2"]), st.integers(0, 2**32))
def test_property_random_sequences(spec_text, seed):
    spec = parse_language_spec(spec_text)
    _, bad = oracles.random_agreement(
        AbelianChecker(spec, 50), NaiveChecker(spec), spec.sigma, 300, seed=seed, capacity=50)
    assert bad == 0


def _no_power_below(w, k, sigma, i):
    n = len(w)
    for b in range(1, min(i, n // k + 1)):
        blocks = {parikh_vector(w[n - (t + 1) * b:n - t * b], sigma) for t in range(k)}
        if len(blocks) == 1:
            return False
    return True


@pytest.mark.parametrize("spec_text", ["apf:4:2", "apf:3:3"])
def test_scan_loop_invariant(spec_text):
    """At each iteration no k-power suffix has block length below the current candidate."""
    spec = parse_language_spec(spec_text)
    k = spec.power.k
    chk = AbelianChecker(spec, 400)
    random_walk(chk, 400, WalkOptions(rng_seed=2))
    w = chk.word
    probe = AbelianChecker(spec, 401, trace_capacity=4096)
    for m in range(1, len(w) + 1):
        probe.push(w[m - 1])
        probe.take_trace()
        probe.scan()
        for i, l in probe.take_trace():
            assert _no_power_below(w[:m], k, spec.sigma, i)
            assert l <= m


def test_mean_checks_recorded_on_long_walk():
    chk = AbelianChecker(parse_language_spec("apf:3:3"), 2000)
    random_walk(chk, 2000, WalkOptions(rng_seed=4))
    assert 1.0 <= chk.average_suffix_checks() < 2000
