"""The rewrite catalog.

Every operation shares one shape: (segment, budget, rng, lexicons) plus
operation-specific keywords, returning (segment, records).  An operation
whose trigger is absent returns the segment unchanged with zero records.
Edits are atomic: the token deltas are computed first, offered to the budget
(which may refuse an edit that would push any watched metric past its bound),
and only then applied, so a refused edit leaves no trace.

rng discipline: candidates are visited in textual order unless noted; each
operation documents its draws so a scripted rng can pin outcomes in tests.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .numwords import number_to_words
from .spelling import best_correction
from .textmodel import (
    CaseShape,
    CoarsePos,
    MAX_SEGMENT_WORDS,
    Segment,
    Sentence,
    SENTENCE_TERMINALS,
    Token,
    TokenKind,
    _tag_word,
    detokenize,
    render_segment,
    split_sentences,
    tag_pos,
    tokenize,
)

__all__ = [
    "TransformKind",
    "TransformRecord",
    "merge_sentences",
    "split_sentence",
    "adjust_stopwords",
    "correct_spelling",
    "inject_misspellings",
    "adjust_punctuation",
    "substitute_words",
    "apply_paraphrases",
    "normalize_uppercase",
    "switch_spelling_variant",
    "insert_discourse_marker",
    "expand_contractions",
    "numbers_to_words",
    "verbalize_equations",
    "replace_symbols_abbreviations",
    "restructure_possessives",
    "MERGE_CONNECTORS",
    "EXCLAMATION_VARIANTS",
    "QUESTION_VARIANTS",
    "unsupported_numerals",
]


class TransformKind(Enum):
    MERGE_SENTENCES = "MergeSentences"
    SPLIT_SENTENCE = "SplitSentence"
    STOPWORD_REMOVE = "StopwordRemove"
    STOPWORD_REPLACE = "StopwordReplace"
    SPELL_CORRECT = "SpellCorrect"
    SPELL_CORRUPT = "SpellCorrupt"
    PUNCT_REMOVE = "PunctRemove"
    PUNCT_INSERT = "PunctInsert"
    PUNCT_REDUNDANT = "PunctRedundant"
    SYNONYM_SUB = "SynonymSub"
    DEFINITION_SUB = "DefinitionSub"
    PARAPHRASE = "Paraphrase"
    LOWERCASE_ALL_CAPS = "LowercaseAllCaps"
    SPELLING_VARIANT_SWITCH = "SpellingVariantSwitch"
    DISCOURSE_MARKER_INSERT = "DiscourseMarkerInsert"
    CONTRACTION_EXPAND = "ContractionExpand"
    NUMBER_TO_WORDS = "NumberToWords"
    EQUATION_VERBALIZE = "EquationVerbalize"
    SYMBOL_ABBREV_EXPAND = "SymbolAbbrevExpand"
    POSSESSIVE_RESTRUCTURE = "PossessiveRestructure"


@dataclass
class TransformRecord:
    kind: TransformKind
    segment_index: int
    before: str
    after: str
    metric_touch: dict[str, int] = field(default_factory=dict)
    note: str = ""


MERGE_CONNECTORS = ("and", "as", "yet")
MERGE_JOINERS = (",", ";")
EXCLAMATION_VARIANTS = ("!", "!!", "!!!")
QUESTION_VARIANTS = ("?", "??", "???", "?!?", "!?!")

# weights for clause punctuation inserted before prepositions
_COMMA_SHARE = 0.75

_REMOVABLE_PUNCT = {",", ";", ":"}

EQ_COMPARISON = re.compile(r".[<>=]+.")
EQ_ARITHMETIC = re.compile(r".[+\-*/]+.")

# longest symbols first so ">=" never reads as ">" then "="
SYMBOL_WORDS = (
    ("<=", "less than or equal to"),
    (">=", "greater than or equal to"),
    ("=", "equals"),
    ("<", "less than"),
    (">", "greater than"),
    ("+", "plus"),
    ("-", "minus"),
    ("*", "multiplied by"),
    ("/", "divided by"),
)

CURRENCY_WORDS = {"$": "dollars", "£": "pounds", "€": "euros", "¥": "yen"}
STANDALONE_SYMBOL_WORDS = {"%": "percent", "@": "at", "&": "and"}

_APOSTROPHES = ("'", "’")


# ---------------------------------------------------------------------------
# shared plumbing

def _key(surface: str) -> str:
    low = surface.lower()
    return low.replace("’", "'")


def make_word(surface: str, lexicons=None) -> Token:
    """A synthesized word/number token, tagged and stopword-checked."""
    kind = TokenKind.NUMBER if surface[:1].isdigit() else TokenKind.WORD
    tok = Token(surface, kind)
    if kind is TokenKind.NUMBER:
        tok.pos = CoarsePos.NUMERAL
    else:
        preps = getattr(lexicons, "prepositions", frozenset())
        tok.pos = _tag_word(surface.lower(), preps)
    stop = getattr(lexicons, "stopwords", frozenset())
    tok.is_stopword = tok.is_word and _key(surface) in stop
    return tok


def make_punct(surface: str) -> Token:
    return Token(surface, TokenKind.PUNCTUATION, pos=CoarsePos.PUNCT)


def make_words(text: str, lexicons=None) -> list[Token]:
    return [make_word(part, lexicons) for part in text.split()]


def _delta(budget, name: str, default: float = 0.0) -> float:
    if budget is None:
        return default
    return budget.delta(name)


def _satisfied(budget, name: str) -> bool:
    if budget is None:
        return False
    return budget.satisfied(name)


def _try_edit(budget, removed: list[Token], added: list[Token], dsent: int = 0,
              segment: Optional[Segment] = None) -> bool:
    # growth stops at the segment cap so sizing stays valid after rewriting;
    # segments born over the cap are exempt (they could never comply)
    if segment is not None and not segment.oversize:
        net = (sum(1 for t in added if t.is_word)
               - sum(1 for t in removed if t.is_word))
        if net > 0 and segment.word_count + net > MAX_SEGMENT_WORDS:
            return False
    if budget is None:
        return True
    return budget.try_edit(removed, added, dsent)


def _shuffled_indices(n: int, rng) -> list[int]:
    order = list(range(n))
    if rng is not None:
        rng.shuffle(order)
    return order


def _with_case_of(surface: str, template_shape: CaseShape) -> str:
    if template_shape is CaseShape.ALL_CAPS:
        return surface.upper()
    if template_shape in (CaseShape.CAPITALIZED, CaseShape.MIXED):
        return surface[:1].upper() + surface[1:]
    return surface


def _capitalize_token(tok: Token) -> None:
    tok.surface = tok.surface[:1].upper() + tok.surface[1:]


def _lowercase_token(tok: Token) -> None:
    # the pronoun "I" and its contractions keep their capital anywhere
    if tok.surface == "I" or tok.surface.startswith(("I'", "I’")):
        return
    if tok.case_shape is CaseShape.CAPITALIZED and not tok.proper:
        tok.surface = tok.surface.lower()


def _first_word_index(sentence: Sentence) -> int:
    for i, tok in enumerate(sentence.tokens):
        if tok.is_word:
            return i
    return -1


def _record(records: list[TransformRecord], kind: TransformKind, segment_index: int,
            before: str, after: str, touch: dict[str, int], note: str = "") -> None:
    if before != after:
        records.append(TransformRecord(kind, segment_index, before, after, dict(touch), note))


class _Edit:
    """Snapshot helper: capture text around one atomic rewrite."""

    def __init__(self, segment: Segment):
        self.segment = segment
        self.before = render_segment(segment)

    def commit(self, records, kind, segment_index, touch, note: str = ""):
        self.segment.touched = True
        after = render_segment(self.segment)
        _record(records, kind, segment_index, self.before, after, touch, note)


# ---------------------------------------------------------------------------
# sentence length

def merge_sentences(segment: Segment, budget, rng, lexicons, *,
                    segment_index: int = 0):
    """Join all sentences of the segment into one.

    Each internal terminal becomes a drawn joiner (comma or semicolon)
    followed by a drawn connector word; the following word loses its capital
    unless proper-flagged.  Draws per boundary: rng.choice on joiners, then
    rng.choice on connectors.  Trigger: at least two sentences and, when a
    budget is given, sentences currently too short (delta > 0).
    """
    records: list[TransformRecord] = []
    if len(segment.sentences) < 2:
        return segment, records
    if budget is not None and _delta(budget, "avg_sentence_len", 1.0) <= 0:
        return segment, records

    # plan all boundary rewrites, then offer the whole merge as one edit
    planned = []
    removed: list[Token] = []
    added: list[Token] = []
    for sent in segment.sentences[:-1]:
        term_idx = None
        for i in range(len(sent.tokens) - 1, -1, -1):
            tok = sent.tokens[i]
            if tok.kind is TokenKind.PUNCTUATION and tok.surface in SENTENCE_TERMINALS:
                term_idx = i
                break
        joiner = rng.choice(MERGE_JOINERS)
        connector = make_word(rng.choice(MERGE_CONNECTORS), lexicons)
        planned.append((sent, term_idx, joiner, connector))
        if term_idx is not None:
            removed.append(sent.tokens[term_idx])
        added.append(connector)
    dsent = -(len(segment.sentences) - 1)
    if not _try_edit(budget, removed, added, dsent, segment=segment):
        return segment, records

    edit = _Edit(segment)
    merged: list[Token] = []
    for i, sent in enumerate(segment.sentences):
        toks = list(sent.tokens)
        if i < len(segment.sentences) - 1:
            sent_, term_idx, joiner, connector = planned[i]
            if term_idx is not None:
                toks[term_idx] = make_punct(joiner)
            else:
                toks.append(make_punct(joiner))
            toks.append(connector)
        if i > 0:
            j = next((k for k, t in enumerate(toks) if t.is_word), -1)
            if j >= 0:
                _lowercase_token(toks[j])
        merged.extend(toks)
    segment.sentences = [Sentence(merged)]
    edit.commit(records, TransformKind.MERGE_SENTENCES, segment_index,
                {"avg_sentence_len": 1})
    return segment, records


def _find_split_site(segment: Segment, skip: set[int]) -> Optional[tuple[int, int]]:
    # first "and" preceded (within its clause) by a noun and a verb, with
    # material after it; `skip` holds refused sites by flat position
    flat = -1
    for si, sent in enumerate(segment.sentences):
        nouns = verbs = 0
        for ti, tok in enumerate(sent.tokens):
            flat += 1
            if (tok.pos is CoarsePos.CONJUNCTION and _key(tok.surface) == "and"
                    and nouns >= 1 and verbs >= 1 and flat not in skip
                    and any(t.is_word for t in sent.tokens[ti + 1:])):
                return si, ti
            if tok.pos is CoarsePos.NOUN:
                nouns += 1
            elif tok.pos is CoarsePos.VERB:
                verbs += 1
    return None


def split_sentence(segment: Segment, budget, rng, lexicons, *,
                   segment_index: int = 0):
    """Break long sentences at "and" once a clause has both a noun and a verb.

    Scanning left to right, noun and verb counters accumulate; at a
    Conjunction token "and" with both counters positive, the conjunction
    becomes a period (a clause comma right before it is dropped), the next
    word is capitalized and the counters reset.  One split is applied at a
    time, leftmost first.  No rng draws.  Trigger: sentences currently too
    long (delta < 0) when a budget is given.
    """
    records: list[TransformRecord] = []
    if budget is not None and _delta(budget, "avg_sentence_len", -1.0) >= 0:
        return segment, records

    refused: set[int] = set()
    while not _satisfied(budget, "avg_sentence_len"):
        site = _find_split_site(segment, refused)
        if site is None:
            break
        si, ti = site
        sent = segment.sentences[si]
        drop_comma = (ti >= 1 and sent.tokens[ti - 1].kind is TokenKind.PUNCTUATION
                      and sent.tokens[ti - 1].surface in (",", ";"))
        removed = [sent.tokens[ti]] + ([sent.tokens[ti - 1]] if drop_comma else [])
        if not _try_edit(budget, removed, [make_punct(".")], dsent=1, segment=segment):
            flat = sum(len(s.tokens) for s in segment.sentences[:si]) + ti
            refused.add(flat)
            continue
        edit = _Edit(segment)
        head = sent.tokens[:ti - 1] if drop_comma else sent.tokens[:ti]
        tail = sent.tokens[ti + 1:]
        head.append(make_punct("."))
        j = _first_word_index(Sentence(tail))
        if j >= 0:
            _capitalize_token(tail[j])
        segment.sentences[si:si + 1] = [Sentence(head), Sentence(tail)]
        edit.commit(records, TransformKind.SPLIT_SENTENCE, segment_index,
                    {"avg_sentence_len": -1})
    return segment, records


# ---------------------------------------------------------------------------
# stopwords

def _stopword_count(text: str, stopwords) -> int:
    return sum(1 for w in text.lower().split() if w in stopwords)


def adjust_stopwords(segment: Segment, budget, rng, lexicons, *,
                     segment_index: int = 0, direction: int = 0,
                     enabled_kinds: Optional[set] = None):
    """Move the stopword share toward its target via the alternatives table.

    Too many stopwords (delta < 0): candidates may be deleted (an empty
    alternative permits it) or swapped for an alternative containing fewer
    stopwords.  Too few (delta > 0): swapped for a longer alternative phrase
    containing more stopwords.  Draws: candidate order is shuffled once, then
    one choice among the eligible alternatives per candidate.
    """
    records: list[TransformRecord] = []
    if direction == 0:
        d = _delta(budget, "stopword_ratio", 0.0)
        direction = -1 if d < 0 else (1 if d > 0 else 0)
    if direction == 0:
        return segment, records
    kinds_ok = enabled_kinds if enabled_kinds is not None else {
        TransformKind.STOPWORD_REMOVE, TransformKind.STOPWORD_REPLACE}

    stopwords = lexicons.stopwords
    table = lexicons.stopword_alternatives

    sites = []
    for si, sent in enumerate(segment.sentences):
        for ti, tok in enumerate(sent.tokens):
            if tok.is_stopword and _key(tok.surface) in table:
                sites.append((si, ti))
    for pos in _shuffled_indices(len(sites), rng):
        if _satisfied(budget, "stopword_ratio"):
            break
        si, ti = sites[pos]
        sent = segment.sentences[si]
        tok = sent.tokens[ti]
        options = []
        for alt in table[_key(tok.surface)]:
            if alt == "":
                if direction < 0 and TransformKind.STOPWORD_REMOVE in kinds_ok \
                        and sent.word_count > 1:
                    options.append(alt)
                continue
            if TransformKind.STOPWORD_REPLACE not in kinds_ok:
                continue
            gain = _stopword_count(alt, stopwords) - 1
            if (direction < 0 and gain < 0) or (direction > 0 and gain > 0):
                options.append(alt)
        if not options:
            continue
        choice = rng.choice(options)
        if choice == "":
            if not _try_edit(budget, [tok], [], segment=segment):
                continue
            edit = _Edit(segment)
            was_initial = ti == _first_word_index(sent)
            del sent.tokens[ti]
            if was_initial:
                j = _first_word_index(sent)
                if j >= 0 and tok.case_shape is CaseShape.CAPITALIZED:
                    _capitalize_token(sent.tokens[j])
            _reindex_after_removal(sites, si, ti)
            edit.commit(records, TransformKind.STOPWORD_REMOVE, segment_index,
                        {"stopword_ratio": -1})
        else:
            new_tokens = make_words(choice, lexicons)
            new_tokens[0].surface = _with_case_of(new_tokens[0].surface, tok.case_shape)
            if not _try_edit(budget, [tok], new_tokens, segment=segment):
                continue
            edit = _Edit(segment)
            sent.tokens[ti:ti + 1] = new_tokens
            _reindex_after_insert(sites, si, ti, len(new_tokens) - 1)
            edit.commit(records, TransformKind.STOPWORD_REPLACE, segment_index,
                        {"stopword_ratio": direction})
    return segment, records


def _reindex_after_removal(sites: list, si: int, ti: int) -> None:
    for k, (s, t) in enumerate(sites):
        if s == si and t > ti:
            sites[k] = (s, t - 1)


def _reindex_after_insert(sites: list, si: int, ti: int, extra: int) -> None:
    if extra == 0:
        return
    for k, (s, t) in enumerate(sites):
        if s == si and t > ti:
            sites[k] = (s, t + extra)


# ---------------------------------------------------------------------------
# spelling

def _spell_candidate(tok: Token) -> bool:
    s = tok.surface
    return (tok.kind is TokenKind.WORD and tok.case_shape is CaseShape.LOWER
            and len(s) >= 3 and s.isalpha())


def correct_spelling(segment: Segment, budget, rng, lexicons, *,
                     segment_index: int = 0):
    """Replace out-of-vocabulary words with their most likely known form.

    Candidates are lowercase alphabetic words of three or more letters; the
    noisy-channel model picks the nearest frequent in-vocabulary word within
    edit distance two.  Deterministic, no draws.
    """
    records: list[TransformRecord] = []
    for sent in segment.sentences:
        for ti, tok in enumerate(sent.tokens):
            if _satisfied(budget, "oov_ratio"):
                return segment, records
            if not _spell_candidate(tok) or tok.proper:
                continue
            if tok.surface.lower() in lexicons.known_vocabulary:
                continue
            fixed = best_correction(tok.surface, lexicons)
            if fixed is None:
                continue
            new_tok = make_word(fixed, lexicons)
            if not _try_edit(budget, [tok], [new_tok], segment=segment):
                continue
            edit = _Edit(segment)
            sent.tokens[ti] = new_tok
            edit.commit(records, TransformKind.SPELL_CORRECT, segment_index,
                        {"oov_ratio": -1})
    return segment, records


def inject_misspellings(segment: Segment, budget, rng, lexicons, *,
                        segment_index: int = 0):
    """Swap correctly spelled words for common mistakes from the lexicon.

    Draws: candidate order shuffled once, then one choice among the listed
    mistakes per touched word.
    """
    records: list[TransformRecord] = []
    sites = []
    for si, sent in enumerate(segment.sentences):
        for ti, tok in enumerate(sent.tokens):
            if _spell_candidate(tok) and _key(tok.surface) in lexicons.misspellings:
                sites.append((si, ti))
    for pos in _shuffled_indices(len(sites), rng):
        if _satisfied(budget, "oov_ratio"):
            break
        si, ti = sites[pos]
        tok = segment.sentences[si].tokens[ti]
        mistakes = lexicons.misspellings[_key(tok.surface)]
        if not mistakes:
            continue
        wrong = rng.choice(mistakes)
        new_tok = make_word(wrong, lexicons)
        if not _try_edit(budget, [tok], [new_tok], segment=segment):
            continue
        edit = _Edit(segment)
        segment.sentences[si].tokens[ti] = new_tok
        edit.commit(records, TransformKind.SPELL_CORRUPT, segment_index,
                    {"oov_ratio": 1})
    return segment, records


# ---------------------------------------------------------------------------
# punctuation

def adjust_punctuation(segment: Segment, budget, rng, lexicons, *,
                       segment_index: int = 0, direction: int = 0):
    """Move the punctuation share toward its target.

    Too much (delta < 0): clause punctuation (comma, semicolon, colon) is
    removed, shuffled order.  Too little (delta > 0): clause punctuation is
    inserted before preposition tokens (comma three times as likely as
    semicolon), then terminals are emphasised: "!" redrawn from {!, !!, !!!},
    "?" from {?, ??, ???, ?!?, !?!}; a redraw equal to the original changes
    nothing and logs nothing.
    """
    records: list[TransformRecord] = []
    if direction == 0:
        d = _delta(budget, "punct_ratio", 0.0)
        direction = -1 if d < 0 else (1 if d > 0 else 0)
    if direction == 0:
        return segment, records

    if direction < 0:
        sites = []
        for si, sent in enumerate(segment.sentences):
            for ti, tok in enumerate(sent.tokens):
                if tok.kind is TokenKind.PUNCTUATION and tok.surface in _REMOVABLE_PUNCT:
                    sites.append((si, ti))
        for pos in _shuffled_indices(len(sites), rng):
            if _satisfied(budget, "punct_ratio"):
                break
            si, ti = sites[pos]
            tok = segment.sentences[si].tokens[ti]
            if not _try_edit(budget, [tok], [], segment=segment):
                continue
            edit = _Edit(segment)
            del segment.sentences[si].tokens[ti]
            _reindex_after_removal(sites, si, ti)
            edit.commit(records, TransformKind.PUNCT_REMOVE, segment_index,
                        {"punct_ratio": -1})
        return segment, records

    # insertion before prepositions
    sites = []
    for si, sent in enumerate(segment.sentences):
        first = _first_word_index(sent)
        for ti, tok in enumerate(sent.tokens):
            if (tok.pos is CoarsePos.PREPOSITION and ti > first
                    and ti > 0
                    and sent.tokens[ti - 1].kind is not TokenKind.PUNCTUATION):
                sites.append((si, ti))
    for pos in _shuffled_indices(len(sites), rng):
        if _satisfied(budget, "punct_ratio"):
            break
        si, ti = sites[pos]
        mark = "," if rng.random() < _COMMA_SHARE else ";"
        new_tok = make_punct(mark)
        if not _try_edit(budget, [], [new_tok], segment=segment):
            continue
        edit = _Edit(segment)
        segment.sentences[si].tokens.insert(ti, new_tok)
        _reindex_after_insert(sites, si, ti - 1, 1)
        edit.commit(records, TransformKind.PUNCT_INSERT, segment_index,
                    {"punct_ratio": 1})

    # terminal emphasis; sites fixed up front so fresh marks are not revisited
    term_sites = []
    for si, sent in enumerate(segment.sentences):
        for ti, tok in enumerate(sent.tokens):
            if tok.kind is TokenKind.PUNCTUATION and tok.surface in ("!", "?"):
                term_sites.append((si, ti))
    for si, ti in term_sites:
        if _satisfied(budget, "punct_ratio"):
            break
        tok = segment.sentences[si].tokens[ti]
        if tok.surface == "!":
            variant = rng.choice(EXCLAMATION_VARIANTS)
        else:
            variant = rng.choice(QUESTION_VARIANTS)
        if variant == tok.surface:
            continue
        added = [make_punct(c) for c in variant]
        if not _try_edit(budget, [tok], added, segment=segment):
            continue
        edit = _Edit(segment)
        segment.sentences[si].tokens[ti:ti + 1] = added
        _reindex_after_insert(term_sites, si, ti, len(added) - 1)
        edit.commit(records, TransformKind.PUNCT_REDUNDANT, segment_index,
                    {"punct_ratio": 1})
    return segment, records


# ---------------------------------------------------------------------------
# word substitution

_POS_NAMES = {
    CoarsePos.NOUN: "noun",
    CoarsePos.VERB: "verb",
    CoarsePos.ADJECTIVE: "adjective",
    CoarsePos.ADVERB: "adverb",
}


def _content_word(tok: Token) -> bool:
    return (tok.kind is TokenKind.WORD and not tok.is_stopword and not tok.proper
            and tok.pos in _POS_NAMES)


def substitute_words(segment: Segment, budget, rng, lexicons, *,
                     segment_index: int = 0, direction: int = 0,
                     doc_frequencies: Optional[dict] = None):
    """Move lexical diversity toward its target.

    Diversity too high (delta < 0): rare content words whose synonym or
    hypernym already occurs in the document are folded into that existing
    word, rarest first; a word fully replaced this way stops counting as a
    distinct type.  Diversity too low (delta > 0): words used exactly once
    are replaced by their dictionary definition phrase, shuffled once.
    """
    records: list[TransformRecord] = []
    if direction == 0:
        d = _delta(budget, "type_token_ratio", 0.0)
        direction = -1 if d < 0 else (1 if d > 0 else 0)
    if direction == 0:
        return segment, records
    freqs = doc_frequencies or {}
    if not freqs:
        counts: dict[str, int] = {}
        for tok in segment.tokens:
            if tok.is_word:
                k = tok.surface.lower()
                counts[k] = counts.get(k, 0) + 1
        freqs = counts

    if direction < 0:
        # rarest first, so single-use words vanish before common ones shrink
        ranked = sorted(
            (w for w in freqs if w in lexicons.synonymy),
            key=lambda w: (freqs[w], w))
        for word in ranked:
            if _satisfied(budget, "type_token_ratio"):
                break
            entry = lexicons.synonymy[word]
            sites = [(si, ti)
                     for si, sent in enumerate(segment.sentences)
                     for ti, tok in enumerate(sent.tokens)
                     if _content_word(tok) and tok.surface.lower() == word
                     and _POS_NAMES[tok.pos] == entry.pos]
            if not sites:
                continue
            choices = entry.synonyms + tuple(
                h for h in entry.hypernyms if h not in entry.synonyms)
            # only merge into single words the document already uses; that
            # can never raise the distinct-type count
            choices = tuple(c for c in choices
                            if c != word and " " not in c and freqs.get(c, 0))
            if not choices:
                continue
            replacement = min(choices, key=lambda c: (-freqs[c], c))
            for si, ti in sites:
                if _satisfied(budget, "type_token_ratio"):
                    break
                tok = segment.sentences[si].tokens[ti]
                new_tokens = make_words(replacement, lexicons)
                new_tokens[0].surface = _with_case_of(
                    new_tokens[0].surface, tok.case_shape)
                if not _try_edit(budget, [tok], new_tokens, segment=segment):
                    continue
                edit = _Edit(segment)
                segment.sentences[si].tokens[ti:ti + 1] = new_tokens
                edit.commit(records, TransformKind.SYNONYM_SUB, segment_index,
                            {"type_token_ratio": -1})
        return segment, records

    # definition substitution for single-use words
    sites = [(si, ti)
             for si, sent in enumerate(segment.sentences)
             for ti, tok in enumerate(sent.tokens)
             if _content_word(tok)
             and freqs.get(tok.surface.lower(), 0) == 1
             and tok.surface.lower() in lexicons.synonymy
             and lexicons.synonymy[tok.surface.lower()].definition]
    for pos in _shuffled_indices(len(sites), rng):
        if _satisfied(budget, "type_token_ratio"):
            break
        si, ti = sites[pos]
        tok = segment.sentences[si].tokens[ti]
        entry = lexicons.synonymy[tok.surface.lower()]
        if entry.pos != _POS_NAMES.get(tok.pos):
            continue
        new_tokens = make_words(entry.definition, lexicons)
        new_tokens[0].surface = _with_case_of(new_tokens[0].surface, tok.case_shape)
        if not _try_edit(budget, [tok], new_tokens, segment=segment):
            continue
        edit = _Edit(segment)
        segment.sentences[si].tokens[ti:ti + 1] = new_tokens
        _reindex_after_insert(sites, si, ti, len(new_tokens) - 1)
        edit.commit(records, TransformKind.DEFINITION_SUB, segment_index,
                    {"type_token_ratio": 1})
    return segment, records


# ---------------------------------------------------------------------------
# paraphrases

def apply_paraphrases(segment: Segment, budget, rng, lexicons, *,
                      segment_index: int = 0, probability: float = 0.5):
    """Swap known multi-word phrases for listed variants.

    Longest match first over windows of consecutive word tokens (up to four).
    Draws per match: one acceptance draw against `probability`, then one
    choice among the variants.  The leading-capital shape of the matched span
    carries over to the replacement.
    """
    records: list[TransformRecord] = []
    max_len = 4
    for sent in segment.sentences:
        ti = 0
        while ti < len(sent.tokens):
            hit = None
            for L in range(max_len, 0, -1):
                window = sent.tokens[ti:ti + L]
                if len(window) < L or not all(t.kind is TokenKind.WORD for t in window):
                    continue
                key = " ".join(_key(t.surface) for t in window)
                variants = lexicons.paraphrases.get(key)
                if variants:
                    hit = (L, key, variants)
                    break
            if hit is None:
                ti += 1
                continue
            L, key, variants = hit
            if rng.random() >= probability:
                ti += L
                continue
            replacement = rng.choice(variants)
            window = sent.tokens[ti:ti + L]
            new_tokens = make_words(replacement, lexicons)
            lead = window[0].case_shape
            if lead in (CaseShape.CAPITALIZED, CaseShape.ALL_CAPS):
                new_tokens[0].surface = _with_case_of(
                    new_tokens[0].surface, CaseShape.CAPITALIZED)
            if replacement == key or not _try_edit(budget, list(window), new_tokens, segment=segment):
                ti += L
                continue
            edit = _Edit(segment)
            sent.tokens[ti:ti + L] = new_tokens
            edit.commit(records, TransformKind.PARAPHRASE, segment_index, {})
            ti += len(new_tokens)
    return segment, records


# ---------------------------------------------------------------------------
# case

def normalize_uppercase(segment: Segment, budget, rng, lexicons, *,
                        segment_index: int = 0):
    """Lowercase shouted words: all-caps tokens with four or more letters.

    Shorter all-caps tokens read as acronyms and are never touched; so are
    proper-flagged tokens (their lowercase form is unknown to the lexicon, a
    name or initialism).  A sentence-initial hit keeps its leading capital.
    Draws: candidate order shuffled once.
    """
    records: list[TransformRecord] = []
    sites = []
    for si, sent in enumerate(segment.sentences):
        first = _first_word_index(sent)
        for ti, tok in enumerate(sent.tokens):
            if (tok.kind is TokenKind.WORD and tok.case_shape is CaseShape.ALL_CAPS
                    and sum(1 for c in tok.surface if c.isalpha()) >= 4
                    and not tok.proper):
                sites.append((si, ti, ti == first))
    for pos in _shuffled_indices(len(sites), rng):
        if _satisfied(budget, "uppercase_ratio"):
            break
        si, ti, initial = sites[pos]
        tok = segment.sentences[si].tokens[ti]
        new_surface = tok.surface.lower()
        if initial:
            new_surface = new_surface[:1].upper() + new_surface[1:]
        new_tok = make_word(new_surface, lexicons)
        if not _try_edit(budget, [tok], [new_tok], segment=segment):
            continue
        edit = _Edit(segment)
        segment.sentences[si].tokens[ti] = new_tok
        edit.commit(records, TransformKind.LOWERCASE_ALL_CAPS, segment_index,
                    {"uppercase_ratio": -1})
    return segment, records


# ---------------------------------------------------------------------------
# noise

def switch_spelling_variant(segment: Segment, budget, rng, lexicons, *,
                            segment_index: int = 0, probability: float = 0.15):
    """Flip words between their British and American spellings.

    Applying the transform twice restores the original text: the pair table
    is a bijection and the case shape carries over both ways.  Draws: one
    acceptance draw per candidate word, in textual order.
    """
    records: list[TransformRecord] = []
    for sent in segment.sentences:
        for ti, tok in enumerate(sent.tokens):
            if tok.kind is not TokenKind.WORD:
                continue
            other = lexicons.spelling_variant(_key(tok.surface))
            if other is None:
                continue
            if rng.random() >= probability:
                continue
            new_tok = make_word(_with_case_of(other, tok.case_shape), lexicons)
            new_tok.proper = tok.proper
            if not _try_edit(budget, [tok], [new_tok], segment=segment):
                continue
            edit = _Edit(segment)
            sent.tokens[ti] = new_tok
            edit.commit(records, TransformKind.SPELLING_VARIANT_SWITCH,
                        segment_index, {})
    return segment, records


def insert_discourse_marker(segment: Segment, budget, rng, lexicons, *,
                            segment_index: int = 0, probability: float = 0.15):
    """Open some sentences with a discourse marker and a comma.

    The previous first word loses its capital unless proper-flagged or an
    acronym.  Draws per sentence: one acceptance draw, then one choice among
    the markers.
    """
    records: list[TransformRecord] = []
    if not lexicons.discourse_markers:
        return segment, records
    for sent in segment.sentences:
        if rng.random() >= probability:
            continue
        marker = rng.choice(lexicons.discourse_markers)
        j = _first_word_index(sent)
        if j < 0:
            continue
        head = make_word(marker[:1].upper() + marker[1:], lexicons)
        comma = make_punct(",")
        if not _try_edit(budget, [], [head, comma], segment=segment):
            continue
        edit = _Edit(segment)
        _lowercase_token(sent.tokens[j])
        sent.tokens[:0] = [head, comma]
        edit.commit(records, TransformKind.DISCOURSE_MARKER_INSERT,
                    segment_index, {})
    return segment, records


# ---------------------------------------------------------------------------
# general rewrites

def expand_contractions(segment: Segment, budget, rng, lexicons, *,
                        segment_index: int = 0):
    """Expand every known contraction to its full form.

    The first expansion listed in the lexicon is the default; an entry with
    more than one listed expansion is genuinely ambiguous ("I'd") and the
    record notes the assumption.  The original case shape carries to the
    first expanded word.  No draws.
    """
    records: list[TransformRecord] = []
    for sent in segment.sentences:
        ti = 0
        while ti < len(sent.tokens):
            tok = sent.tokens[ti]
            key = _key(tok.surface)
            expansions = lexicons.contractions.get(key) \
                if tok.kind is TokenKind.WORD else None
            if not expansions:
                ti += 1
                continue
            full = expansions[0]
            new_tokens = make_words(full, lexicons)
            new_tokens[0].surface = _with_case_of(new_tokens[0].surface, tok.case_shape)
            if tok.case_shape is CaseShape.ALL_CAPS:
                for nt in new_tokens:
                    nt.surface = nt.surface.upper()
            note = ""
            if len(expansions) > 1:
                note = f"ambiguous; expanded to {full!r}"
            if not _try_edit(budget, [tok], new_tokens, segment=segment):
                ti += 1
                continue
            edit = _Edit(segment)
            sent.tokens[ti:ti + 1] = new_tokens
            edit.commit(records, TransformKind.CONTRACTION_EXPAND, segment_index,
                        {}, note)
            ti += len(new_tokens)
    return segment, records


def numbers_to_words(segment: Segment, budget, rng, lexicons, *,
                     segment_index: int = 0):
    """Verbalize numeric tokens: integers, decimals, ordinals, list markers.

    A sentence-initial numeral gets a leading capital.  Tokens the verbalizer
    cannot express (exponent notation, a billion or more) stay untouched; the
    pipeline reports them from what remains.  No draws.
    """
    records: list[TransformRecord] = []
    for sent in segment.sentences:
        ti = 0
        while ti < len(sent.tokens):
            tok = sent.tokens[ti]
            if tok.kind is not TokenKind.NUMBER:
                ti += 1
                continue
            words = number_to_words(tok.surface)
            if words is None:
                ti += 1
                continue
            initial = ti == _first_word_index(sent)
            new_tokens = make_words(words, lexicons)
            if initial:
                _capitalize_token(new_tokens[0])
            if not _try_edit(budget, [tok], new_tokens, segment=segment):
                ti += 1
                continue
            edit = _Edit(segment)
            sent.tokens[ti:ti + 1] = new_tokens
            edit.commit(records, TransformKind.NUMBER_TO_WORDS, segment_index, {})
            ti += len(new_tokens)
    return segment, records


def unsupported_numerals(segment: Segment) -> list[str]:
    """Numeric surfaces the verbalizer cannot express, for reporting."""
    out = []
    for tok in segment.tokens:
        if tok.kind is TokenKind.NUMBER and number_to_words(tok.surface) is None:
            out.append(tok.surface)
    return out


def _verbalize_chunk(chunk: str) -> str:
    parts: list[str] = []
    buf = ""
    i = 0
    while i < len(chunk):
        for sym, words in SYMBOL_WORDS:
            if chunk.startswith(sym, i):
                if buf:
                    parts.append(buf)
                    buf = ""
                parts.append(words)
                i += len(sym)
                break
        else:
            buf += chunk[i]
            i += 1
    if buf:
        parts.append(buf)
    return " ".join(parts)


def verbalize_equations(segment: Segment, budget, rng, lexicons, *,
                        segment_index: int = 0):
    """Spell out operators inside equation-like chunks.

    The segment qualifies only when its text contains both a comparison
    symbol and an arithmetic symbol with neighbours on both sides; within it,
    only whitespace-delimited chunks that satisfy both conditions themselves
    are rewritten, so a stray hyphenated word is never verbalized.  The
    rewrite is textual and the segment is re-tokenized afterwards.  No draws.
    """
    records: list[TransformRecord] = []
    text = render_segment(segment)
    if not (EQ_COMPARISON.search(text) and EQ_ARITHMETIC.search(text)):
        return segment, records

    changed = False
    out = []
    last = 0
    for m in re.finditer(r"\S+", text):
        chunk = m.group()
        if EQ_COMPARISON.search(chunk) and EQ_ARITHMETIC.search(chunk):
            new_chunk = _verbalize_chunk(chunk)
            if new_chunk != chunk:
                out.append(text[last:m.start()])
                out.append(new_chunk)
                last = m.end()
                changed = True
    out.append(text[last:])
    if not changed:
        return segment, records
    new_text = "".join(out)

    old_tokens = segment.tokens
    new_tokens = tokenize(new_text)
    sentences = split_sentences(new_tokens)
    for sent in sentences:
        tag_pos(sent, lexicons)
    if not _try_edit(budget, old_tokens, [t for s in sentences for t in s.tokens], segment=segment):
        return segment, records
    before = text
    segment.sentences = sentences
    segment.source_text = new_text
    segment.touched = False
    _record(records, TransformKind.EQUATION_VERBALIZE, segment_index,
            before, new_text, {})
    return segment, records


def replace_symbols_abbreviations(segment: Segment, budget, rng, lexicons, *,
                                  segment_index: int = 0):
    """Expand title abbreviations and spell out standalone symbols.

    "Dr." becomes "Doctor", "%" becomes "percent", currency marks become the
    currency word placed after the amount ("$5" reads "5 dollars").  An "@"
    glued between two words looks like an address and is left alone.  No
    draws.
    """
    records: list[TransformRecord] = []
    abbrev_lower = {k.lower(): v for k, v in lexicons.abbreviations.items()}
    for sent in segment.sentences:
        ti = 0
        while ti < len(sent.tokens):
            tok = sent.tokens[ti]
            nxt = sent.tokens[ti + 1] if ti + 1 < len(sent.tokens) else None

            # one-token abbreviations carrying their own dots ("i.e.")
            if tok.kind is TokenKind.WORD and "." in tok.surface \
                    and tok.surface.lower() in abbrev_lower:
                expansion = abbrev_lower[tok.surface.lower()]
                new_tokens = make_words(expansion, lexicons)
                if _try_edit(budget, [tok], new_tokens, segment=segment):
                    edit = _Edit(segment)
                    sent.tokens[ti:ti + 1] = new_tokens
                    edit.commit(records, TransformKind.SYMBOL_ABBREV_EXPAND,
                                segment_index, {})
                    ti += len(new_tokens)
                    continue

            # word + period abbreviations ("Dr" ".")
            if tok.kind is TokenKind.WORD and nxt is not None \
                    and nxt.kind is TokenKind.PUNCTUATION and nxt.surface == "." \
                    and (tok.surface.lower() + ".") in abbrev_lower:
                expansion = abbrev_lower[tok.surface.lower() + "."]
                new_tokens = make_words(expansion, lexicons)
                if tok.case_shape is CaseShape.LOWER:
                    for nt in new_tokens:
                        nt.surface = nt.surface.lower()
                # when the period also ends the sentence it stays put
                terminal = all(t.kind is TokenKind.PUNCTUATION
                               for t in sent.tokens[ti + 1:])
                removed = [tok] if terminal else [tok, nxt]
                if _try_edit(budget, removed, new_tokens, segment=segment):
                    edit = _Edit(segment)
                    sent.tokens[ti:ti + len(removed)] = new_tokens
                    edit.commit(records, TransformKind.SYMBOL_ABBREV_EXPAND,
                                segment_index, {})
                    ti += len(new_tokens)
                    continue

            if tok.kind is TokenKind.SYMBOL and tok.surface in CURRENCY_WORDS:
                word = CURRENCY_WORDS[tok.surface]
                if nxt is not None and nxt.kind is TokenKind.NUMBER:
                    # amount first, currency word after it
                    amount = nxt.clone()
                    amount.start = amount.end = -1
                    new_tokens = [amount, make_word(word, lexicons)]
                    if _try_edit(budget, [tok, nxt], new_tokens, segment=segment):
                        edit = _Edit(segment)
                        sent.tokens[ti:ti + 2] = new_tokens
                        edit.commit(records, TransformKind.SYMBOL_ABBREV_EXPAND,
                                    segment_index, {})
                        ti += 2
                        continue
                else:
                    new_tok = make_word(word, lexicons)
                    if _try_edit(budget, [tok], [new_tok], segment=segment):
                        edit = _Edit(segment)
                        sent.tokens[ti] = new_tok
                        edit.commit(records, TransformKind.SYMBOL_ABBREV_EXPAND,
                                    segment_index, {})
                        ti += 1
                        continue

            if tok.kind is TokenKind.SYMBOL and tok.surface in STANDALONE_SYMBOL_WORDS:
                glued = (tok.surface == "@" and not tok.synthesized
                         and ti > 0 and ti + 1 < len(sent.tokens)
                         and sent.tokens[ti - 1].end == tok.start
                         and sent.tokens[ti + 1].start == tok.end)
                if not glued:
                    new_tok = make_word(STANDALONE_SYMBOL_WORDS[tok.surface], lexicons)
                    if _try_edit(budget, [tok], [new_tok], segment=segment):
                        edit = _Edit(segment)
                        sent.tokens[ti] = new_tok
                        edit.commit(records, TransformKind.SYMBOL_ABBREV_EXPAND,
                                    segment_index, {})
                        ti += 1
                        continue
            ti += 1
    return segment, records


def restructure_possessives(segment: Segment, budget, rng, lexicons, *,
                            segment_index: int = 0):
    """Turn "X of Y" into "Y's X" when Y reads as a proper name.

    Guards: X must be noun-tagged and Y capitalized, so "out of ten" and
    "house of cards" pass through untouched.  When X sat at the head of the
    sentence, its capital moves to Y's side.  No draws.
    """
    records: list[TransformRecord] = []
    for sent in segment.sentences:
        ti = 0
        while ti + 2 < len(sent.tokens):
            x, of, y = sent.tokens[ti], sent.tokens[ti + 1], sent.tokens[ti + 2]
            ok = (x.kind is TokenKind.WORD and x.pos is CoarsePos.NOUN
                  and of.kind is TokenKind.WORD and _key(of.surface) == "of"
                  and y.kind is TokenKind.WORD
                  and y.case_shape in (CaseShape.CAPITALIZED, CaseShape.MIXED))
            if not ok:
                ti += 1
                continue
            initial = ti == _first_word_index(sent)
            new_x = x.clone()
            new_x.start = new_x.end = -1
            if initial and x.case_shape is CaseShape.CAPITALIZED and not x.proper:
                new_x.surface = new_x.surface.lower()
            owner = make_word(y.surface + "'s", lexicons)
            owner.pos = CoarsePos.NOUN
            owner.proper = y.proper
            if not _try_edit(budget, [x, of, y], [owner, new_x], segment=segment):
                ti += 3
                continue
            edit = _Edit(segment)
            sent.tokens[ti:ti + 3] = [owner, new_x]
            edit.commit(records, TransformKind.POSSESSIVE_RESTRUCTURE,
                        segment_index, {})
            ti += 2
    return segment, records
