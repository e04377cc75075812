"""Numerals to canonical English phrases, and the inverse parser.

Covers non-negative integers below one billion, thousands groups with commas,
simple decimals (digits read out after "point") and ordinal suffixes.
Anything else (exponent notation, out-of-range values) is reported as
unsupported so the caller can leave the token alone and log it.
"""

from __future__ import annotations

import re
from typing import Optional

__all__ = ["number_to_words", "words_to_number", "MAX_SUPPORTED"]

MAX_SUPPORTED = 10 ** 9

ONES = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
        "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
        "sixteen", "seventeen", "eighteen", "nineteen"]
TENS = ["", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy",
        "eighty", "ninety"]
SCALES = [(10 ** 6, "million"), (10 ** 3, "thousand"), (100, "hundred")]

_ORDINAL_IRREGULAR = {
    "one": "first", "two": "second", "three": "third", "five": "fifth",
    "eight": "eighth", "nine": "ninth", "twelve": "twelfth",
}

_NUMERIC_RE = re.compile(
    r"^(?P<int>\d+(?:,\d{3})*)"
    r"(?:\.(?P<frac>\d+))?"
    r"(?P<ord>st|nd|rd|th)?$"
)


def _small_to_words(n: int) -> str:
    '''Words for 0..99.'''
    if n < 20:
        return ONES[n]
    tens, ones = divmod(n, 10)
    if ones == 0:
        return TENS[tens]
    return TENS[tens] + "-" + ONES[ones]


def _int_to_words(n: int) -> str:
    if n < 100:
        return _small_to_words(n)
    for scale, name in SCALES:
        if n >= scale:
            head, rest = divmod(n, scale)
            words = _int_to_words(head) + " " + name
            if rest:
                words += " " + _int_to_words(rest)
            return words
    raise AssertionError("unreachable")


def _ordinalize(words: str) -> str:
    parts = words.rsplit(" ", 1)
    last = parts[-1]
    if "-" in last:
        head, tail = last.rsplit("-", 1)
        parts[-1] = head + "-" + _ordinalize_word(tail)
    else:
        parts[-1] = _ordinalize_word(last)
    return " ".join(parts)


def _ordinalize_word(word: str) -> str:
    if word in _ORDINAL_IRREGULAR:
        return _ORDINAL_IRREGULAR[word]
    if word.endswith("y"):
        return word[:-1] + "ieth"
    return word + "th"


def number_to_words(surface: str) -> Optional[str]:
    """Verbalize a numeric token surface, or None if unsupported."""
    m = _NUMERIC_RE.match(surface)
    if m is None:
        return None
    value = int(m.group("int").replace(",", ""))
    if value >= MAX_SUPPORTED:
        return None
    words = _int_to_words(value)
    if m.group("ord"):
        if m.group("frac"):
            return None
        return _ordinalize(words)
    frac = m.group("frac")
    if frac:
        words += " point " + " ".join(ONES[int(d)] for d in frac)
    return words


# ---------------------------------------------------------------------------
# inverse parser

_WORD_VALUES: dict[str, int] = {w: i for i, w in enumerate(ONES)}
_WORD_VALUES.update({w: i * 10 for i, w in enumerate(TENS) if w})
_SCALE_VALUES = {"hundred": 100, "thousand": 10 ** 3, "million": 10 ** 6}

_CARDINAL_OF_ORDINAL: dict[str, str] = {}
for _w in list(_WORD_VALUES):
    _CARDINAL_OF_ORDINAL[_ordinalize_word(_w)] = _w
for _s in _SCALE_VALUES:
    _CARDINAL_OF_ORDINAL[_ordinalize_word(_s)] = _s


def words_to_number(phrase: str) -> Optional[float]:
    """Parse a verbalized numeral back to its numeric value.

    Accepts the output language of number_to_words: cardinals, ordinals and
    "point"-separated decimal digits.  Returns None when the phrase is not a
    well-formed numeral.
    """
    tokens: list[str] = []
    for chunk in phrase.lower().split():
        tokens.extend(chunk.split("-"))
    if not tokens:
        return None

    frac = ""
    if "point" in tokens:
        idx = tokens.index("point")
        digit_words = tokens[idx + 1:]
        if not digit_words:
            return None
        for w in digit_words:
            if w not in _WORD_VALUES or _WORD_VALUES[w] > 9:
                return None
            frac += str(_WORD_VALUES[w])
        tokens = tokens[:idx]
        if not tokens:
            return None

    # an ordinal tail folds back to its cardinal before evaluation
    if tokens and tokens[-1] in _CARDINAL_OF_ORDINAL:
        tokens = tokens[:-1] + [_CARDINAL_OF_ORDINAL[tokens[-1]]]

    total = 0
    current = 0
    seen_any = False
    for w in tokens:
        if w in _WORD_VALUES:
            current += _WORD_VALUES[w]
            seen_any = True
        elif w in _SCALE_VALUES:
            scale = _SCALE_VALUES[w]
            if current == 0:
                if not seen_any and scale != 100:
                    return None
                current = 1
            if scale == 100:
                current *= scale
            else:
                total += current * scale
                current = 0
            seen_any = True
        else:
            return None
    if not seen_any:
        return None
    value = total + current
    if frac:
        return value + float("0." + frac)
    return float(value)
