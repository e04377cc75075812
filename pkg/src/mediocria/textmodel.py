"""Layered text model: tokens, sentences, segments, documents.

Policy: tokenization is exhaustive over non-whitespace text and every token
from the source carries its character span, so an untouched document renders
back byte-identical.  Rewritten material is synthesized without spans and is
re-spaced by a small detokenizer.  Sentence splitting and part-of-speech
tagging are rule-based on purpose: the same (biased) measurements are applied
to the input document and to the calibration corpus, so systematic tagger
error cancels out of the comparison.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional

__all__ = [
    "TokenKind",
    "CaseShape",
    "CoarsePos",
    "Token",
    "Sentence",
    "Segment",
    "Document",
    "tokenize",
    "split_sentences",
    "tag_pos",
    "segment_document",
    "render",
    "render_segment",
    "detokenize",
    "parse_text",
    "reparse_segment",
    "word_tokens",
    "MAX_SEGMENT_WORDS",
]

MAX_SEGMENT_WORDS = 50


class TokenKind(Enum):
    WORD = "Word"
    PUNCTUATION = "Punctuation"
    NUMBER = "Number"
    SYMBOL = "Symbol"


class CaseShape(Enum):
    LOWER = "Lower"
    CAPITALIZED = "Capitalized"
    ALL_CAPS = "AllCaps"
    MIXED = "Mixed"


class CoarsePos(Enum):
    NOUN = "Noun"
    VERB = "Verb"
    ADJECTIVE = "Adjective"
    ADVERB = "Adverb"
    PRONOUN = "Pronoun"
    DETERMINER = "Determiner"
    PREPOSITION = "Preposition"
    CONJUNCTION = "Conjunction"
    NUMERAL = "Numeral"
    PARTICLE = "Particle"
    PUNCT = "Punct"
    OTHER = "Other"


# Character classes the tokenizer and the metrics agree on.  A token is
# Punctuation iff its surface consists solely of these characters.
PUNCT_CHARS = set(".,;:!?()[]{}\"'“”‘’«»…—–-")

_OPEN_BRACKETS = set("([{")
_CLOSE_BRACKETS = set(")]}")
_NO_SPACE_BEFORE = set(".,;:!?") | _CLOSE_BRACKETS | {"…", "”", "’"}
_NO_SPACE_AFTER = _OPEN_BRACKETS | {"“", "‘"}
_CURRENCY_SYMBOLS = {"$", "£", "€", "¥"}

SENTENCE_TERMINALS = {".", "!", "?"}

# Default abbreviation guard for the sentence splitter; a LexiconBundle's
# abbreviation table extends this set.  Stored lowercase, trailing dot kept.
DEFAULT_ABBREVIATIONS = {
    "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "jr.", "sr.", "rev.",
    "gen.", "col.", "capt.", "sgt.", "hon.", "fr.", "etc.", "vs.", "cf.",
    "approx.", "dept.", "est.", "fig.", "no.", "vol.", "ch.", "pp.",
}


@dataclass
class Token:
    surface: str
    kind: TokenKind
    start: int = -1          # char offset into the source text; -1 = synthesized
    end: int = -1
    pos: Optional[CoarsePos] = None
    is_stopword: bool = False
    proper: bool = False     # proper-noun flag, set by document analysis

    @property
    def synthesized(self) -> bool:
        return self.start < 0

    @property
    def case_shape(self) -> CaseShape:
        letters = [c for c in self.surface if c.isalpha()]
        if not letters:
            return CaseShape.LOWER
        if all(c.islower() for c in letters):
            return CaseShape.LOWER
        if all(c.isupper() for c in letters):
            # A single capital letter ("I", initials) reads as Capitalized;
            # AllCaps is reserved for runs of two or more capitals.
            return CaseShape.ALL_CAPS if len(letters) >= 2 else CaseShape.CAPITALIZED
        if letters[0].isupper() and all(c.islower() for c in letters[1:]):
            return CaseShape.CAPITALIZED
        return CaseShape.MIXED

    @property
    def is_word(self) -> bool:
        return self.kind in (TokenKind.WORD, TokenKind.NUMBER)

    def clone(self) -> "Token":
        return replace(self)


@dataclass
class Sentence:
    tokens: list[Token]

    @property
    def word_count(self) -> int:
        return sum(1 for t in self.tokens if t.is_word)


@dataclass
class Segment:
    sentences: list[Sentence]
    start: int = -1            # span in the original document text
    end: int = -1
    source_text: str = ""      # exact slice of the source for this span
    gap_before: str = ""       # raw text between previous segment and this one
    gap_after: str = ""        # only the final segment owns trailing text
    oversize: bool = False     # single sentence longer than MAX_SEGMENT_WORDS
    touched: bool = False      # any transform rewrote this segment

    @property
    def tokens(self) -> list[Token]:
        return [t for s in self.sentences for t in s.tokens]

    @property
    def word_count(self) -> int:
        return sum(s.word_count for s in self.sentences)


@dataclass
class Document:
    doc_id: str
    raw_text: str
    segments: list[Segment] = field(default_factory=list)

    @property
    def sentences(self) -> list[Sentence]:
        return [s for seg in self.segments for s in seg.sentences]

    @property
    def tokens(self) -> list[Token]:
        return [t for seg in self.segments for t in seg.tokens]


# ---------------------------------------------------------------------------
# tokenization

# Order matters: multi-letter abbreviations ("i.e.", "U.S.A.") and numbers
# (decimals, thousands groups, ordinals, exponents) must win before the bare
# word and single-character branches see them.
_TOKEN_RE = re.compile(
    r"""
      (?P<ABBR>(?:[A-Za-z]\.){2,})
    | (?P<NUM>\d+(?:,\d{3})+(?:\.\d+)?
       |\d+\.\d+(?:[eE][+-]?\d+)?
       |\d+[eE][+-]?\d+
       |\d+(?:st|nd|rd|th)\b
       |\d+)
    | (?P<WORD>[A-Za-z]+(?:['’\-][A-Za-z]+)*)
    | (?P<PUNCT>[.,;:!?()\[\]{}"'“”‘’«»…—–-])
    | (?P<SYM>\S)
    """,
    re.VERBOSE,
)

_KIND_BY_GROUP = {
    "ABBR": TokenKind.WORD,
    "NUM": TokenKind.NUMBER,
    "WORD": TokenKind.WORD,
    "PUNCT": TokenKind.PUNCTUATION,
    "SYM": TokenKind.SYMBOL,
}


def tokenize(text: str) -> list[Token]:
    """Split text into span-carrying tokens; whitespace is never a token."""
    tokens: list[Token] = []
    for m in _TOKEN_RE.finditer(text):
        kind = _KIND_BY_GROUP[m.lastgroup]  # type: ignore[index]
        tokens.append(Token(m.group(), kind, m.start(), m.end()))
    return tokens


# ---------------------------------------------------------------------------
# sentence splitting

def _is_abbreviation(prev: Optional[Token], abbreviations: set[str]) -> bool:
    if prev is None or prev.kind is not TokenKind.WORD:
        return False
    surface = prev.surface
    # single-capital initials ("J. Smith") never end a sentence here
    if len(surface) == 1 and surface.isupper():
        return True
    return (surface.lower() + ".") in abbreviations


def split_sentences(tokens: list[Token],
                    abbreviations: Optional[set[str]] = None) -> list[Sentence]:
    """Group tokens into sentences at terminal punctuation.

    A boundary opens after {., !, ?} plus any immediately following
    punctuation (quotes, brackets, further terminals).  Two guards: a period
    directly after a known abbreviation or a single-capital initial does not
    split; decimal points never surface as separate tokens, so numbers are
    safe by construction.
    """
    abbrevs = DEFAULT_ABBREVIATIONS if abbreviations is None else abbreviations
    sentences: list[Sentence] = []
    current: list[Token] = []
    i = 0
    n = len(tokens)
    while i < n:
        tok = tokens[i]
        current.append(tok)
        if tok.kind is TokenKind.PUNCTUATION and tok.surface in SENTENCE_TERMINALS:
            prev = current[-2] if len(current) >= 2 else None
            if tok.surface == "." and _is_abbreviation(prev, abbrevs):
                i += 1
                continue
            # absorb the rest of the terminal cluster (e.g. ?!", ...")
            j = i + 1
            while j < n and tokens[j].kind is TokenKind.PUNCTUATION:
                current.append(tokens[j])
                j += 1
            if j < n:
                sentences.append(Sentence(current))
                current = []
            i = j
            continue
        i += 1
    if current:
        sentences.append(Sentence(current))
    return sentences


# ---------------------------------------------------------------------------
# part-of-speech tagging

DETERMINERS = frozenset("""
the a an this that these those each every either neither some any no all both
half such another
""".split())

PRONOUNS = frozenset("""
i you he she it we they me him her us them mine yours his hers ours theirs its
myself yourself himself herself itself ourselves yourselves themselves who whom
whose which what somebody anybody everybody nobody someone anyone everyone
something anything everything nothing
""".split())

CONJUNCTIONS = frozenset("""
and or but nor yet as because although though while whereas if unless whether
than when whenever where wherever once
""".split())

AUXILIARY_VERBS = frozenset("""
am is are was were be been being have has had having do does did doing will
would shall should can could may might must ought
""".split())

NUMERAL_WORDS = frozenset("""
zero one two three four five six seven eight nine ten eleven twelve thirteen
fourteen fifteen sixteen seventeen eighteen nineteen twenty thirty forty fifty
sixty seventy eighty ninety hundred thousand million billion first second third
fourth fifth sixth seventh eighth ninth tenth
""".split())

CLOSED_ADVERBS = frozenset("""
not never always often sometimes seldom rarely usually very too also just quite
rather almost nearly soon still again ever here there now then perhaps maybe
indeed however moreover therefore thus instead anyway really truly only even
away together
""".split())

BUILTIN_PREPOSITIONS = frozenset("""
of in to for with on at by from about into over after under between through
during before above below up down out off across behind beyond along among
around upon within without toward towards beside besides despite except inside
outside onto via amid per since until till near unlike against
""".split())

# Small open-class lists: enough signal that the four content ratios land in a
# realistic range.  Everything else falls through to the suffix rules.
COMMON_ADJECTIVES = frozenset("""
good bad big small great old new young long short high low early late important
different large little own other same right wrong sure certain clear strong
weak true false happy sad easy hard free full empty rich poor dark light warm
cold hot cool nice fine proud quiet loud deep shallow wide narrow thick thin
heavy soft slow quick fast busy calm plain simple common rare whole broken open
closed ready able main real local social public private final general several
few many much more most less least better best worse worst last next past
present ancient modern bright pale grey gray green blue red white black brown
yellow pretty ugly clean dirty dry wet fresh stale sweet bitter sharp blunt
gentle fierce steady severe mild grand humble
""".split())

COMMON_VERBS = frozenset("""
go goes went gone going come comes came coming take takes took taken taking
make makes made making know knows knew known knowing think thinks thought
thinking see sees saw seen seeing get gets got gotten getting give gives gave
given giving find finds found finding tell tells told telling say says said
saying become becomes became leave leaves left feel feels felt put puts bring
brings brought begin begins began begun keep keeps kept hold holds held write
writes wrote written stand stands stood hear hears heard let lets mean means
meant set sets meet meets met run runs ran pay pays paid sit sits sat speak
speaks spoke spoken lie lies lay lain lead leads led read reads grow grows grew
grown lose loses lost fall falls fell fallen send sends sent build builds built
understand understands understood draw draws drew drawn break breaks broke
broken spend spends spent cut cuts rise rises rose risen drive drives drove
driven buy buys bought wear wears wore worn choose chooses chose chosen eat
eats ate eaten drink drinks drank sleep sleeps slept walk walks talk talks live
lives lived look looks looked want wants wanted seem seems seemed ask asks
asked work works worked call calls called try tries tried need needs needed
turn turns turned move moves moved play plays played believe believes believed
happen happens happened remain remains remained carry carries carried watch
watches watched follow follows followed stop stops stopped wait waits waited
die dies died stay stays stayed reach reaches reached answer answers answered
remember remembers remembered
""".split())

COMMON_NOUN_EXCEPTIONS = frozenset("""
thing something anything nothing everything morning evening king ring spring
string wing being feeling meeting building ceiling
""".split())

_NOUN_SUFFIXES = ("tion", "sion", "ness", "ment", "ity", "ence", "ance",
                  "ship", "hood", "ism", "ist", "dom")
_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "ic", "ish", "less")
_VERB_SUFFIXES = ("ize", "ise", "ify")


def _tag_word(lower: str, prepositions: frozenset[str] | set[str]) -> CoarsePos:
    if lower in DETERMINERS:
        return CoarsePos.DETERMINER
    if lower in PRONOUNS:
        return CoarsePos.PRONOUN
    if lower in CONJUNCTIONS:
        return CoarsePos.CONJUNCTION
    if lower in prepositions or lower in BUILTIN_PREPOSITIONS:
        return CoarsePos.PREPOSITION
    if lower in AUXILIARY_VERBS:
        return CoarsePos.VERB
    if lower in NUMERAL_WORDS:
        return CoarsePos.NUMERAL
    if lower in CLOSED_ADVERBS:
        return CoarsePos.ADVERB
    if lower in COMMON_NOUN_EXCEPTIONS:
        return CoarsePos.NOUN
    if lower in COMMON_VERBS:
        return CoarsePos.VERB
    if lower in COMMON_ADJECTIVES:
        return CoarsePos.ADJECTIVE
    if lower.endswith("ly") and len(lower) > 3:
        return CoarsePos.ADVERB
    for suf in _NOUN_SUFFIXES:
        if lower.endswith(suf) and len(lower) > len(suf) + 1:
            return CoarsePos.NOUN
    for suf in _ADJ_SUFFIXES:
        if lower.endswith(suf) and len(lower) > len(suf) + 1:
            return CoarsePos.ADJECTIVE
    for suf in _VERB_SUFFIXES:
        if lower.endswith(suf) and len(lower) > len(suf):
            return CoarsePos.VERB
    if lower.endswith("ed") and len(lower) >= 5:
        return CoarsePos.VERB
    if lower.endswith("ing") and len(lower) >= 6:
        return CoarsePos.VERB
    return CoarsePos.NOUN


def tag_pos(sentence: Sentence, lexicons=None) -> Sentence:
    """Assign a coarse part of speech to every token, in place.

    Lookup order: closed-class lists, small open-class lists, suffix rules,
    default Noun.  Also marks stopword membership when a lexicon bundle is
    supplied.  Deterministic: output depends only on (sentence, lexicons).
    """
    prepositions = getattr(lexicons, "prepositions", frozenset())
    stopwords = getattr(lexicons, "stopwords", frozenset())
    for tok in sentence.tokens:
        if tok.kind is TokenKind.PUNCTUATION:
            tok.pos = CoarsePos.PUNCT
        elif tok.kind is TokenKind.SYMBOL:
            tok.pos = CoarsePos.OTHER
        elif tok.kind is TokenKind.NUMBER:
            tok.pos = CoarsePos.NUMERAL
        else:
            tok.pos = _tag_word(tok.surface.lower(), prepositions)
        tok.is_stopword = tok.is_word and tok.surface.lower() in stopwords
    return sentence


# ---------------------------------------------------------------------------
# segmentation

def segment_document(sentences: list[Sentence], raw_text: str = "") -> list[Segment]:
    """Greedy packing of consecutive sentences into segments of <= 50 words.

    A single sentence above the cap becomes its own segment flagged oversize
    and is never split here.  Segments keep their source span and slice so an
    untouched segment renders byte-identical.
    """
    segments: list[Segment] = []
    bucket: list[Sentence] = []
    bucket_words = 0

    def flush() -> None:
        nonlocal bucket, bucket_words
        if bucket:
            segments.append(Segment(bucket))
            bucket = []
            bucket_words = 0

    for sent in sentences:
        wc = sent.word_count
        if wc > MAX_SEGMENT_WORDS:
            flush()
            segments.append(Segment([sent], oversize=True))
            continue
        if bucket_words + wc > MAX_SEGMENT_WORDS:
            flush()
        bucket.append(sent)
        bucket_words += wc
    flush()

    # attach spans, slices and inter-segment gap text
    prev_end = 0
    for seg in segments:
        toks = seg.tokens
        if toks and toks[0].start >= 0:
            seg.start = toks[0].start
            seg.end = toks[-1].end
            seg.source_text = raw_text[seg.start:seg.end] if raw_text else ""
            seg.gap_before = raw_text[prev_end:seg.start] if raw_text else ""
            prev_end = seg.end
    if segments and raw_text:
        segments[-1].gap_after = raw_text[prev_end:]
    return segments


# ---------------------------------------------------------------------------
# rendering

def detokenize(tokens: Iterable[Token]) -> str:
    """Join token surfaces with standard spacing.

    No space before closing or clause punctuation, none after an opening
    bracket; straight double quotes alternate open/close.
    """
    out: list[str] = []
    quote_open = False
    prev: Optional[Token] = None
    for tok in tokens:
        s = tok.surface
        if not out:
            out.append(s)
            prev = tok
            if s == '"':
                quote_open = True
            continue
        space = True
        if s and s[0] in _NO_SPACE_BEFORE and tok.kind is TokenKind.PUNCTUATION:
            space = False
        if prev is not None and prev.surface and prev.surface[-1] in _NO_SPACE_AFTER \
                and prev.kind is TokenKind.PUNCTUATION:
            space = False
        if prev is not None and prev.kind is TokenKind.SYMBOL \
                and prev.surface in _CURRENCY_SYMBOLS and tok.kind is TokenKind.NUMBER:
            space = False           # "$5", not "$ 5"
        if s == '"':
            if quote_open:
                space = False       # closing quote hugs the left
                quote_open = False
            else:
                quote_open = True   # opening quote keeps its left space
        elif prev is not None and prev.surface == '"' and quote_open:
            space = False           # text after an opening quote hugs it
        if space:
            out.append(" ")
        out.append(s)
        prev = tok
    return "".join(out)


def render_segment(segment: Segment) -> str:
    if not segment.touched and segment.source_text:
        return segment.source_text
    return detokenize(segment.tokens)


def render(segments: list[Segment]) -> str:
    """Reassemble segments, preserving original inter-segment text."""
    parts: list[str] = []
    for i, seg in enumerate(segments):
        gap = seg.gap_before
        if not gap and i > 0:
            gap = " "
        parts.append(gap)
        parts.append(render_segment(seg))
    if segments:
        parts.append(segments[-1].gap_after)
    return "".join(parts)


# ---------------------------------------------------------------------------
# convenience

def word_tokens(scope) -> list[Token]:
    """Word and number tokens of a Document, Segment or Sentence list."""
    if isinstance(scope, (Document, Segment)):
        toks = scope.tokens
    elif isinstance(scope, Sentence):
        toks = scope.tokens
    else:
        toks = [t for s in scope for t in s.tokens]
    return [t for t in toks if t.is_word]


def _mark_proper_nouns(doc: Document, known_vocabulary: set[str]) -> None:
    # A word is proper-flagged when it appears capitalized mid-sentence, or
    # when every occurrence is capitalized and its lowercase form is unknown.
    mid_sentence_caps: set[str] = set()
    seen_lower: set[str] = set()
    always_capped: dict[str, bool] = {}
    for sent in doc.sentences:
        first_word = True
        for tok in sent.tokens:
            if not tok.is_word or tok.kind is not TokenKind.WORD:
                continue
            lower = tok.surface.lower()
            shape = tok.case_shape
            capped = shape in (CaseShape.CAPITALIZED, CaseShape.MIXED)
            if shape is CaseShape.LOWER:
                seen_lower.add(lower)
                always_capped[lower] = False
            else:
                always_capped.setdefault(lower, True)
            if capped and not first_word:
                mid_sentence_caps.add(lower)
            first_word = False
    proper: set[str] = set(mid_sentence_caps)
    for lower, always in always_capped.items():
        if always and lower not in seen_lower and lower not in known_vocabulary:
            proper.add(lower)
    for tok in doc.tokens:
        if tok.kind is TokenKind.WORD and tok.surface.lower() in proper \
                and tok.case_shape is not CaseShape.LOWER:
            tok.proper = True


def parse_text(doc_id: str, text: str, lexicons=None) -> Document:
    """Full pipeline from raw text to a segmented, tagged Document."""
    abbrevs = set(DEFAULT_ABBREVIATIONS)
    if lexicons is not None:
        abbrevs |= {k.lower() for k in getattr(lexicons, "abbreviations", {})
                    if k.endswith(".")}
    tokens = tokenize(text)
    sentences = split_sentences(tokens, abbrevs)
    for sent in sentences:
        tag_pos(sent, lexicons)
    doc = Document(doc_id, text, segment_document(sentences, text))
    vocab = set()
    if lexicons is not None:
        vocab = getattr(lexicons, "known_vocabulary", set())
    _mark_proper_nouns(doc, vocab)
    return doc


def reparse_segment(segment: Segment, lexicons=None) -> Segment:
    """Re-tokenize a rewritten segment from its rendered text.

    The segment keeps its original span bookkeeping (start/end/gaps refer to
    the source document) while sentences and tags are rebuilt from the current
    surface form.  Proper flags are re-derived locally: a word keeps the flag
    if any occurrence in the old token list carried it.
    """
    if not segment.touched:
        return segment
    text = detokenize(segment.tokens)
    proper_words = {t.surface.lower() for t in segment.tokens if t.proper}
    abbrevs = set(DEFAULT_ABBREVIATIONS)
    if lexicons is not None:
        abbrevs |= {k.lower() for k in getattr(lexicons, "abbreviations", {})
                    if k.endswith(".")}
    tokens = tokenize(text)
    sentences = split_sentences(tokens, abbrevs)
    for sent in sentences:
        tag_pos(sent, lexicons)
        for tok in sent.tokens:
            if tok.surface.lower() in proper_words:
                tok.proper = True
    segment.sentences = sentences
    segment.source_text = text
    # Rebuilt token spans index the rendered text, which becomes the segment's
    # own source; clearing `touched` makes the segment render as exactly that
    # string until the next transform edits it.  Original start/end/gaps are
    # untouched: they keep addressing the source document.
    segment.touched = False
    return segment
