import pytest
from hypothesis import given, settings, strategies as st

from markov_entropy.lang import NaiveChecker, parse_language_spec, parse_word
from markov_entropy.power import PowerChecker
from markov_entropy.walker import WalkOptions, random_walk

import oracles


def _load(spec_text, word, capacity=64):
    chk = PowerChecker(parse_language_spec(spec_text), capacity)
    for a in parse_word(word):
        assert chk.push(a)
    return chk


def test_binary_square_free_examples():
    chk = _load("pf:2:2", "01")
    assert chk.push(0)
    chk.pop()
    assert not chk.push(1)  # 011 ends with 11


def test_cube_free_extension_and_dead_end():
    chk = _load("pf:2:3", "0100100")
    assert chk.push(1)  # 01001001: period-3 suffix of length 6 only
    chk = _load("pf:2:3", "00100100")
    assert not chk.push(0)
    chk.pop()
    assert not chk.push(1)


def test_push_pop_round_trip_restores_index():
    chk = _load("pf:3:2", "0120")
    snapshot = [chk.repeat(i, j) for i in range(chk.rows) for j in range(1, 5)]
    assert chk.push(2)
    chk.pop()
    assert chk.word == parse_word("0120")
    assert [chk.repeat(i, j) for i in range(chk.rows) for j in range(1, 5)] == snapshot


def test_rejected_letter_must_be_popped():
    chk = _load("pf:2:2", "0")
    assert not chk.push(0)
    with pytest.raises(RuntimeError):
        chk.push(1)
    chk.pop()
    assert chk.push(1)


def test_capacity_and_alphabet_guards():
    chk = PowerChecker(parse_language_spec("pf:3:2"), 2)
    with pytest.raises(ValueError):
        chk.push(3)
    chk.push(0)
    chk.push(1)
    with pytest.raises(OverflowError):
        chk.push(2)
    with pytest.raises(IndexError):
        PowerChecker(parse_language_spec("pf:3:2"), 2).pop()


def test_first_push_probes_one_cell():
    chk = PowerChecker(parse_language_spec("pf:3:2"), 16)
    chk.push(0)
    assert chk.average_probe_count() == pytest.approx(1.0)


@pytest.mark.parametrize("spec_text", ["pf:2:2", "pf:2:3", "pf:3:2", "pf:2:7/3+", "pf:3:7/4+", "pf:3:2:b=3"])
def test_exhaustive_short_words(spec_text):
    spec = parse_language_spec(spec_text)
    checked, bad = oracles.exhaustive_agreement(
        lambda: PowerChecker(spec, 12), lambda: NaiveChecker(spec), spec.sigma, 9)
    assert checked > 0 and bad == []


@pytest.mark.parametrize("spec_text", ["pf:3:2", "pf:2:3", "pf:2:7/3+", "pf:5:5/4+", "pf:2:5/2", "pf:3:2:b=4"])
def test_random_push_pop_matches_naive(spec_text):
    spec = parse_language_spec(spec_text)
    longest, bad = oracles.random_agreement(
        PowerChecker(spec, 150), NaiveChecker(spec), spec.sigma, 3000, seed=11, capacity=150)
    assert bad == 0
    assert longest > 20


def _previous_occurrence(w, j, length):
    """End of the last occurrence of w[j-length+1..j] ending before j (1-based), 0 if none."""
    if j < length:
        return 0
    target = w[j - length:j]
    for y in range(j - 1, length - 1, -1):
        if w[y - length:y] == target:
            return y
    return 0


@pytest.mark.parametrize("spec_text", ["pf:3:2", "pf:2:7/3+", "pf:2:3"])
def test_repeat_rows_hold_previous_occurrences(spec_text):
    spec = parse_language_spec(spec_text)
    chk = PowerChecker(spec, 300)
    prof = random_walk(chk, 300, WalkOptions(rng_seed=5))
    assert prof.n == 300
    w = chk.word
    for j in range(1, len(w) + 1):
        for i in range(chk.rows):
            assert chk.repeat(i, j) == _previous_occurrence(w, j, 1 << i), (i, j)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["pf:2:2", "pf:2:3", "pf:3:2", "pf:2:7/3+", "pf:3:7/4+", "pf:4:7/5+"]),
       st.integers(0, 2**32))
def test_property_random_sequences(spec_text, seed):
    spec = parse_language_spec(spec_text)
    _, bad = oracles.random_agreement(
        PowerChecker(spec, 60), NaiveChecker(spec), spec.sigma, 400, seed=seed, capacity=60)
    assert bad == 0


def test_probe_count_is_finite_on_long_walk():
    chk = PowerChecker(parse_language_spec("pf:3:2"), 10_000)
    random_walk(chk, 10_000, WalkOptions(rng_seed=1))
    value = chk.average_probe_count()
    assert 1.0 <= value < 1000.0


def test_reset_statistics():
    chk = _load("pf:3:2", "012")
    chk.reset_statistics()
    with pytest.raises(ValueError):
        chk.average_probe_count()
    assert chk.pushes == 0
