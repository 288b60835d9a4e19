from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from markov_entropy import lang
from markov_entropy.lang import (
    PowerSpec,
    SpecError,
    ends_with_abelian_power_naive,
    ends_with_forbidden_power_naive,
    forbidden_power_length,
    is_member,
    parse_language_spec,
    parse_language_sweep,
    parse_word,
)

import oracles


@pytest.mark.parametrize("text, sigma, beta, plus", [
    ("pf:3:2", 3, Fraction(2), False),
    ("pf:2:7/3+", 2, Fraction(7, 3), True),
    ("pf:5:5/4+", 5, Fraction(5, 4), True),
])
def test_parse_power_specs(text, sigma, beta, plus):
    spec = parse_language_spec(text)
    assert (spec.sigma, spec.power.beta, spec.power.plus) == (sigma, beta, plus)
    assert not spec.is_abelian
    assert str(spec) == text


def test_parse_abelian_spec():
    spec = parse_language_spec("apf:4:2")
    assert spec.is_abelian and spec.sigma == 4 and spec.power.k == 2


def test_parse_period_bound_and_sweep():
    assert parse_language_spec("pf:3:2:b=7").period_bound == 7
    sweep = parse_language_sweep("pf:3:2:b=2..5")
    assert [s.period_bound for s in sweep] == [2, 3, 4, 5]


@pytest.mark.parametrize("bad", [
    "pf:1:2", "pf:3:1", "pf:3:1/2", "pf:3:2/0", "apf:3:1", "xpf:2:2", "pf:3:2:b=0", "", "pf:3",
])
def test_parse_rejects_bad_specs(bad):
    with pytest.raises(SpecError):
        parse_language_spec(bad)


def test_sweep_rejects_empty_range():
    with pytest.raises(SpecError):
        parse_language_sweep("pf:3:2:b=5..2")


@pytest.mark.parametrize("beta, plus, p, expected", [
    (2, False, 3, 6),
    (2, True, 3, 7),
    (Fraction(7, 3), True, 3, 8),
    (Fraction(7, 3), False, 3, 7),
    (Fraction(5, 4), True, 4, 6),
])
def test_forbidden_power_length(beta, plus, p, expected):
    assert forbidden_power_length(PowerSpec("power", Fraction(beta), plus), p) == expected


def test_plus_square_of_010_is_0100100():
    spec = parse_language_spec("pf:2:2+")
    u = parse_word("0100100")
    assert len(u) == forbidden_power_length(spec.power, 3)
    assert ends_with_forbidden_power_naive(u, spec) == 3


def test_naive_power_suffix_examples():
    assert ends_with_forbidden_power_naive(parse_word("0100100"), parse_language_spec("pf:2:7/3")) == 3
    assert ends_with_forbidden_power_naive(parse_word("0101"), parse_language_spec("pf:2:7/3+")) is None
    assert ends_with_forbidden_power_naive(parse_word("00"), parse_language_spec("pf:2:2")) == 1


def test_naive_abelian_suffix_examples():
    assert ends_with_abelian_power_naive(parse_word("0110"), 2) == 2
    assert ends_with_abelian_power_naive(parse_word("012"), 2) is None
    assert ends_with_abelian_power_naive(parse_word("000"), 3) == 1
    assert ends_with_abelian_power_naive(parse_word("0120"), 2) is None


def test_membership_examples():
    cube_free = parse_language_spec("pf:2:3")
    assert is_member(parse_word("010"), cube_free)
    assert not is_member(parse_word("000"), cube_free)
    u = parse_word("00100100")
    assert is_member(u, cube_free)
    assert not is_member(u + (0,), cube_free)
    assert not is_member(u + (1,), cube_free)


def test_period_bound_limits_checked_periods():
    spec = parse_language_spec("pf:2:2:b=1")
    assert ends_with_forbidden_power_naive(parse_word("0101"), spec) is None
    assert ends_with_forbidden_power_naive(parse_word("011"), spec) == 1


def test_factor_is_one_based_inclusive():
    w = parse_word("01201")
    assert lang.factor(w, 2, 4) == (1, 2, 0)
    assert lang.factor(w, 3, 2) == ()


def test_naive_checker_stack_discipline():
    chk = lang.NaiveChecker(parse_language_spec("pf:2:2"))
    assert chk.push(0) and chk.push(1)
    assert not chk.push(1)
    with pytest.raises(RuntimeError):
        chk.push(0)
    chk.pop()
    assert chk.word == (0, 1)
    assert chk.push(0)


_exponents = st.sampled_from([
    (2, Fraction(2), False), (2, Fraction(3), False), (2, Fraction(7, 3), True),
    (3, Fraction(2), False), (3, Fraction(7, 4), True), (2, Fraction(5, 2), False),
])


@settings(max_examples=300, deadline=None)
@given(_exponents.flatmap(lambda e: st.tuples(
    st.just(e), st.lists(st.integers(0, e[0] - 1), max_size=11))))
def test_membership_matches_exponent_oracle(case):
    (sigma, beta, plus), w = case
    spec = lang.LanguageSpec(sigma, PowerSpec("power", beta, plus))
    assert is_member(tuple(w), spec) == (not oracles.contains_power(tuple(w), beta, plus))


@settings(max_examples=300, deadline=None)
@given(st.integers(2, 4), st.integers(2, 3), st.data())
def test_abelian_membership_matches_counter_oracle(sigma, k, data):
    w = tuple(data.draw(st.lists(st.integers(0, sigma - 1), max_size=10)))
    spec = lang.LanguageSpec(sigma, PowerSpec("abelian", k=k))
    assert is_member(w, spec) == (not oracles.contains_abelian_power(w, k))


@given(st.text(alphabet="0123456789abc", max_size=20))
def test_word_render_round_trip(text):
    assert lang.render_word(parse_word(text)) == text
