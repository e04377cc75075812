"""Numeral verbalization and its inverse."""

from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from mediocria.numwords import MAX_SUPPORTED, number_to_words, words_to_number

# ---------------------------------------------------------------------------
# frozen samples

FORWARD = [
    ("0", "zero"),
    ("4", "four"),
    ("13", "thirteen"),
    ("21", "twenty-one"),
    ("40", "forty"),
    ("100", "one hundred"),
    ("101", "one hundred one"),
    ("215", "two hundred fifteen"),
    ("1000", "one thousand"),
    ("1,234", "one thousand two hundred thirty-four"),
    ("250", "two hundred fifty"),
    ("5000000", "five million"),
    ("999999999",
     "nine hundred ninety-nine million nine hundred ninety-nine thousand"
     " nine hundred ninety-nine"),
    ("3.14", "three point one four"),
    ("0.5", "zero point five"),
    ("2nd", "second"),
    ("12th", "twelfth"),
    ("21st", "twenty-first"),
    ("40th", "fortieth"),
    ("1st", "first"),
    ("3rd", "third"),
    ("100th", "one hundredth"),
]


@pytest.mark.parametrize("surface,words", FORWARD)
def test_verbalization_table(surface, words):
    assert number_to_words(surface) == words


@pytest.mark.parametrize("surface", [
    "1000000000",   # at the cap, out of range
    "1e9",          # scientific notation stays numeric
    "2.5e-3",
    "-4",           # signs are part of surrounding text, not the numeral
    "12.5th",
    "abc",
    "",
    "1..2",
])
def test_unsupported_numerals_return_none(surface):
    assert number_to_words(surface) is None


INVERSE = [
    ("zero", 0.0),
    ("four", 4.0),
    ("twenty-one", 21.0),
    ("one hundred one", 101.0),
    ("one thousand two hundred thirty-four", 1234.0),
    ("three point one four", 3.14),
    ("second", 2.0),
    ("twenty-first", 21.0),
    ("fortieth", 40.0),
]


@pytest.mark.parametrize("words,value", INVERSE)
def test_parse_back_table(words, value):
    assert words_to_number(words) == pytest.approx(value)


@pytest.mark.parametrize("words", [
    "banana",
    "",
    "one point",        # dangling decimal
    "thousand",         # scale word with no count
    "point five",       # decimal with no whole part
    "four cats",
])
def test_unparseable_words_return_none(words):
    assert words_to_number(words) is None


def test_supported_range_cap():
    assert MAX_SUPPORTED == 10 ** 9


# ---------------------------------------------------------------------------
# round-trip properties against an independent value oracle

@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=0, max_value=MAX_SUPPORTED - 1))
def test_integers_round_trip(n):
    words = number_to_words(str(n))
    assert words is not None
    assert words_to_number(words) == float(n)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=999999),
       st.integers(min_value=0, max_value=9999))
def test_decimals_round_trip(whole, frac):
    surface = f"{whole}.{frac}"
    words = number_to_words(surface)
    assert words is not None
    assert words_to_number(words) == pytest.approx(float(surface))


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=MAX_SUPPORTED - 1))
def test_ordinals_round_trip(n):
    # any digit string takes the generic "th" suffix in written text
    words = number_to_words(f"{n}th")
    assert words is not None
    assert words_to_number(words) == float(n)
