"""Shared test helpers: scripted randomness, budget stand-ins, oracles.

Kept independent of the package internals on purpose: the Levenshtein
distance and the metric brute-force here must not share code with the
implementations they check.
"""

from __future__ import annotations

from mediocria.metrics import CalibrationProfile, StyleMetrics


class ScriptedRng:
    """random.Random stand-in with pinned draws.

    random() pops scripted values and falls back to 0.0 (always accept);
    choice() pops scripted picks (asserting membership) and falls back to the
    first element; shuffle() keeps textual order.
    """

    def __init__(self, randoms=(), choices=()):
        self._randoms = list(randoms)
        self._choices = list(choices)

    def random(self) -> float:
        return self._randoms.pop(0) if self._randoms else 0.0

    def choice(self, seq):
        if self._choices:
            want = self._choices.pop(0)
            assert want in seq, f"scripted pick {want!r} not offered in {seq!r}"
            return want
        return seq[0]

    def shuffle(self, seq) -> None:
        pass


class StubBudget:
    """Minimal budget double: fixed deltas, scripted satisfaction, and a
    switchable accept/refuse answer for try_edit.  Records every offer."""

    def __init__(self, deltas=None, satisfied=(), accept=True):
        self.deltas = dict(deltas or {})
        self._satisfied = set(satisfied)
        self.accept = accept
        self.offers = []

    def delta(self, name: str) -> float:
        return self.deltas.get(name, 0.0)

    def satisfied(self, name: str) -> bool:
        return name in self._satisfied

    def try_edit(self, removed, added, dsent=0) -> bool:
        self.offers.append((list(removed), list(added), dsent))
        return self.accept


def levenshtein(a: str, b: str) -> int:
    """Plain dynamic-programming edit distance (insert, delete, substitute),
    plus adjacent transposition so it matches the candidate generator's
    notion of one edit."""
    # Damerau-Levenshtein, restricted transpositions
    la, lb = len(a), len(b)
    prev2 = None
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        for j in range(1, lb + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
            if (i > 1 and j > 1 and a[i - 1] == b[j - 2]
                    and a[i - 2] == b[j - 1]):
                cur[j] = min(cur[j], prev2[j - 2] + 1)
        prev2, prev = prev, cur
    return prev[lb]


def make_metrics(**overrides) -> StyleMetrics:
    """A StyleMetrics with placeholder values, overridable per field."""
    values = dict(
        avg_sentence_len=15.0,
        punct_ratio=0.2,
        uppercase_ratio=0.2,
        stopword_ratio=0.2,
        type_token_ratio=0.2,
        noun_ratio=0.2,
        adjective_ratio=0.2,
        verb_ratio=0.2,
        adverb_ratio=0.2,
    )
    values.update(overrides)
    return StyleMetrics(**values)


def make_profile(**overrides) -> CalibrationProfile:
    return CalibrationProfile(make_metrics(**overrides))
