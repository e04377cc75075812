"""Noisy-channel spelling correction over the bundled unigram model.

Norvig-style candidate generation: all edits at distance one, then distance
two, intersected with the known vocabulary and ranked by unigram frequency.
Distance one always beats distance two; frequency breaks ties within a
distance, then spelling order so the choice is deterministic.
"""

from __future__ import annotations

from typing import Iterable, Optional

__all__ = ["edits1", "edits2", "best_correction", "is_known"]

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def edits1(word: str) -> set[str]:
    '''All strings one edit away from word.'''
    splits = [(word[:i], word[i:]) for i in range(len(word) + 1)]
    deletes = [a + b[1:] for a, b in splits if b]
    transposes = [a + b[1] + b[0] + b[2:] for a, b in splits if len(b) > 1]
    replaces = [a + c + b[1:] for a, b in splits if b for c in _LETTERS]
    inserts = [a + c + b for a, b in splits for c in _LETTERS]
    return set(deletes + transposes + replaces + inserts)


def edits2(word: str) -> set[str]:
    '''All strings two edits away from word.'''
    return {e2 for e1 in edits1(word) for e2 in edits1(e1)}


def is_known(word: str, lexicons) -> bool:
    return word.lower() in lexicons.known_vocabulary


def _rank(candidates: Iterable[str], frequencies: dict[str, int]) -> Optional[str]:
    best = None
    best_key = None
    for cand in candidates:
        key = (-frequencies.get(cand, 1), cand)
        if best_key is None or key < best_key:
            best, best_key = cand, key
    return best


def best_correction(word: str, lexicons) -> Optional[str]:
    """Most likely in-vocabulary form of an out-of-vocabulary word.

    Returns None when the word is already known or nothing lies within edit
    distance two.
    """
    low = word.lower()
    vocab = lexicons.known_vocabulary
    if low in vocab:
        return None
    near = edits1(low) & vocab
    if not near:
        near = edits2(low) & vocab
    if not near:
        return None
    return _rank(near, lexicons.word_frequencies)
