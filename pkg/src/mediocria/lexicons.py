"""Loading and validation of the rewrite lexicons.

All files are UTF-8, tab-separated where columnar, `#` starts a comment line,
and `|` delimits list cells.  Keys are lowercase except in the abbreviation
table, whose keys keep their canonical surface ("Dr.").  Parsers are strict:
a row with the wrong column count is an error, not a warning, so a broken
data file fails fast instead of silently skewing rewrites.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from .textmodel import (
    COMMON_ADJECTIVES,
    COMMON_NOUN_EXCEPTIONS,
    COMMON_VERBS,
    AUXILIARY_VERBS,
    CLOSED_ADVERBS,
    CONJUNCTIONS,
    DETERMINERS,
    NUMERAL_WORDS,
    PRONOUNS,
)

__all__ = [
    "LexiconBundle",
    "SynonymEntry",
    "load_bundle",
    "default_bundle",
    "lookup_synonyms",
    "lookup_paraphrases",
    "MalformedLexiconError",
    "MissingLexiconError",
    "REQUIRED_FILES",
]

REQUIRED_FILES = (
    "stopwords.txt",
    "stopword_alternatives.tsv",
    "misspellings.tsv",
    "bre_ame.tsv",
    "discourse_markers.txt",
    "contractions.tsv",
    "abbreviations.tsv",
    "synonymy.tsv",
    "paraphrases.tsv",
    "prepositions.txt",
)

# unigram counts feeding the spell-checker; optional but shipped by default
FREQUENCY_FILE = "word_frequencies.tsv"

_SYNONYM_POS = {"noun", "verb", "adjective", "adverb"}

MAX_PARAPHRASE_KEY_TOKENS = 4


class MalformedLexiconError(ValueError):
    def __init__(self, path, lineno: int, message: str):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


class MissingLexiconError(FileNotFoundError):
    def __init__(self, path):
        self.path = str(path)
        super().__init__(f"required lexicon file missing: {path}")


@dataclass(frozen=True)
class SynonymEntry:
    word: str
    pos: str
    synonyms: tuple[str, ...]
    hypernyms: tuple[str, ...]
    definition: str


@dataclass
class LexiconBundle:
    stopwords: frozenset[str]
    stopword_alternatives: dict[str, tuple[str, ...]]
    misspellings: dict[str, tuple[str, ...]]
    british_to_american: dict[str, str]
    american_to_british: dict[str, str]
    discourse_markers: tuple[str, ...]
    contractions: dict[str, tuple[str, ...]]
    abbreviations: dict[str, str]
    synonymy: dict[str, SynonymEntry]
    paraphrases: dict[str, tuple[str, ...]]
    prepositions: frozenset[str]
    word_frequencies: dict[str, int] = field(default_factory=dict)
    known_vocabulary: frozenset[str] = frozenset()

    def spelling_variant(self, word: str) -> Optional[str]:
        """The other side of the BrE/AmE pair, if the word has one."""
        return self.british_to_american.get(word) or self.american_to_british.get(word)


# ---------------------------------------------------------------------------
# low-level line readers

def _read_lines(path: Path):
    if not path.is_file():
        raise MissingLexiconError(path)
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line


def _split_columns(path: Path, lineno: int, line: str, expected: int) -> list[str]:
    cols = line.split("\t")
    if len(cols) != expected:
        raise MalformedLexiconError(
            path, lineno, f"expected {expected} columns, got {len(cols)}")
    return cols


def _split_list(cell: str) -> tuple[str, ...]:
    # an empty element is meaningful (it marks "deletion allowed")
    if cell == "":
        return ()
    return tuple(p.strip() for p in cell.split("|"))


def _require_lower(path: Path, lineno: int, value: str) -> str:
    if value != value.lower():
        raise MalformedLexiconError(path, lineno, f"entry must be lowercase: {value!r}")
    return value


def _load_wordlist(path: Path) -> tuple[str, ...]:
    out = []
    for lineno, line in _read_lines(path):
        word = line.strip()
        if "\t" in word:
            raise MalformedLexiconError(path, lineno, "word lists take one column")
        out.append(_require_lower(path, lineno, word))
    return tuple(out)


def _load_map_of_lists(path: Path, lower_keys: bool = True) -> dict[str, tuple[str, ...]]:
    out: dict[str, tuple[str, ...]] = {}
    for lineno, line in _read_lines(path):
        key, cell = _split_columns(path, lineno, line, 2)
        if lower_keys:
            key = _require_lower(path, lineno, key)
        if key in out:
            raise MalformedLexiconError(path, lineno, f"duplicate key {key!r}")
        out[key] = _split_list(cell)
    return out


# ---------------------------------------------------------------------------
# per-file loaders with their validation rules

def _load_bre_ame(path: Path) -> tuple[dict[str, str], dict[str, str]]:
    b2a: dict[str, str] = {}
    a2b: dict[str, str] = {}
    for lineno, line in _read_lines(path):
        bre, ame = _split_columns(path, lineno, line, 2)
        bre = _require_lower(path, lineno, bre)
        ame = _require_lower(path, lineno, ame)
        if bre in b2a:
            raise MalformedLexiconError(path, lineno, f"duplicate British form {bre!r}")
        if ame in a2b:
            raise MalformedLexiconError(path, lineno, f"duplicate American form {ame!r}")
        if bre == ame:
            raise MalformedLexiconError(path, lineno, f"identical pair {bre!r}")
        b2a[bre] = ame
        a2b[ame] = bre
    # the two maps are mutual inverses by construction; overlap between key
    # sets would make variant switching non-involutive
    overlap = set(b2a) & set(a2b)
    if overlap:
        raise MalformedLexiconError(path, 0, f"words on both sides: {sorted(overlap)}")
    return b2a, a2b


def _load_contractions(path: Path) -> dict[str, tuple[str, ...]]:
    out = _load_map_of_lists(path)
    for key, expansions in out.items():
        if "'" not in key and "’" not in key:
            raise MalformedLexiconError(path, 0, f"contraction without apostrophe: {key!r}")
        if not expansions or any(not e for e in expansions):
            raise MalformedLexiconError(path, 0, f"empty expansion for {key!r}")
    return out


def _load_abbreviations(path: Path) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in _read_lines(path):
        key, expansion = _split_columns(path, lineno, line, 2)
        if key in out:
            raise MalformedLexiconError(path, lineno, f"duplicate key {key!r}")
        if not expansion:
            raise MalformedLexiconError(path, lineno, f"empty expansion for {key!r}")
        out[key] = expansion
    return out


def _load_synonymy(path: Path) -> dict[str, SynonymEntry]:
    out: dict[str, SynonymEntry] = {}
    for lineno, line in _read_lines(path):
        word, pos, syns, hypers, definition = _split_columns(path, lineno, line, 5)
        word = _require_lower(path, lineno, word)
        if pos not in _SYNONYM_POS:
            raise MalformedLexiconError(path, lineno, f"unknown pos {pos!r}")
        if word in out:
            raise MalformedLexiconError(path, lineno, f"duplicate key {word!r}")
        entry = SynonymEntry(word, pos, _split_list(syns), _split_list(hypers), definition)
        if not entry.synonyms and not entry.hypernyms and not entry.definition:
            raise MalformedLexiconError(path, lineno, f"entry {word!r} offers nothing")
        out[word] = entry
    return out


def _load_paraphrases(path: Path) -> dict[str, tuple[str, ...]]:
    out = _load_map_of_lists(path)
    for key, variants in out.items():
        if len(key.split()) > MAX_PARAPHRASE_KEY_TOKENS:
            raise MalformedLexiconError(
                path, 0, f"paraphrase key longer than {MAX_PARAPHRASE_KEY_TOKENS} tokens: {key!r}")
        if not variants or any(not v for v in variants):
            raise MalformedLexiconError(path, 0, f"empty variant for {key!r}")
    return out


def _load_frequencies(path: Path) -> dict[str, int]:
    out: dict[str, int] = {}
    if not path.is_file():
        return out
    for lineno, line in _read_lines(path):
        word, count = _split_columns(path, lineno, line, 2)
        word = _require_lower(path, lineno, word)
        try:
            n = int(count)
        except ValueError:
            raise MalformedLexiconError(path, lineno, f"bad count {count!r}") from None
        if n <= 0:
            raise MalformedLexiconError(path, lineno, f"count must be positive: {n}")
        out[word] = n
    return out


# ---------------------------------------------------------------------------
# bundle assembly

_TAGGER_WORDS = (DETERMINERS | PRONOUNS | CONJUNCTIONS | AUXILIARY_VERBS
                 | NUMERAL_WORDS | CLOSED_ADVERBS | COMMON_ADJECTIVES
                 | COMMON_VERBS | COMMON_NOUN_EXCEPTIONS)


def _build_vocabulary(bundle: LexiconBundle) -> frozenset[str]:
    vocab: set[str] = set(_TAGGER_WORDS)
    vocab |= bundle.stopwords
    vocab |= set(bundle.word_frequencies)
    vocab |= set(bundle.misspellings)
    vocab |= set(bundle.british_to_american)
    vocab |= set(bundle.american_to_british)
    vocab |= set(bundle.synonymy)
    vocab |= set(bundle.prepositions)
    vocab |= {m.lower() for m in bundle.discourse_markers}
    for key, expansions in bundle.contractions.items():
        vocab.add(key)
        for exp in expansions:
            vocab.update(exp.split())
    for entry in bundle.synonymy.values():
        for w in entry.synonyms + entry.hypernyms:
            vocab.update(w.split())
    return frozenset(vocab)


def load_bundle(directory) -> LexiconBundle:
    """Load and validate every lexicon file from a directory."""
    d = Path(directory)
    for name in REQUIRED_FILES:
        if not (d / name).is_file():
            raise MissingLexiconError(d / name)
    b2a, a2b = _load_bre_ame(d / "bre_ame.tsv")
    bundle = LexiconBundle(
        stopwords=frozenset(_load_wordlist(d / "stopwords.txt")),
        stopword_alternatives=_load_map_of_lists(d / "stopword_alternatives.tsv"),
        misspellings=_load_map_of_lists(d / "misspellings.tsv"),
        british_to_american=b2a,
        american_to_british=a2b,
        discourse_markers=_load_wordlist(d / "discourse_markers.txt"),
        contractions=_load_contractions(d / "contractions.tsv"),
        abbreviations=_load_abbreviations(d / "abbreviations.tsv"),
        synonymy=_load_synonymy(d / "synonymy.tsv"),
        paraphrases=_load_paraphrases(d / "paraphrases.tsv"),
        prepositions=frozenset(_load_wordlist(d / "prepositions.txt")),
        word_frequencies=_load_frequencies(d / FREQUENCY_FILE),
    )
    for word in bundle.stopword_alternatives:
        if word not in bundle.stopwords:
            raise MalformedLexiconError(
                d / "stopword_alternatives.tsv", 0,
                f"alternative listed for non-stopword {word!r}")
    bundle.known_vocabulary = _build_vocabulary(bundle)
    return bundle


def resource_directory() -> Path:
    """Path of the lexicon files shipped inside the package."""
    return Path(resources.files("mediocria") / "resources")


_DEFAULT: Optional[LexiconBundle] = None


def default_bundle() -> LexiconBundle:
    """The packaged lexicons, loaded once per process."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_bundle(resource_directory())
    return _DEFAULT


# ---------------------------------------------------------------------------
# lookups

def lookup_synonyms(word: str, pos: Optional[str], lexicons: LexiconBundle,
                    include_hypernyms: bool = True) -> tuple[str, ...]:
    """Synonyms (and hypernyms) for a word, filtered by coarse POS.

    Matching is case-insensitive on the word; the POS gate is skipped when
    the caller passes None.  Unknown words yield an empty tuple.
    """
    entry = lexicons.synonymy.get(word.lower())
    if entry is None:
        return ()
    if pos is not None and entry.pos != pos.lower():
        return ()
    result = entry.synonyms
    if include_hypernyms:
        result = result + tuple(h for h in entry.hypernyms if h not in result)
    return tuple(s for s in result if s != word.lower())


def lookup_paraphrases(phrase: str, lexicons: LexiconBundle) -> tuple[str, ...]:
    """Rewrite variants for a normalized (lowercase, single-spaced) phrase."""
    key = " ".join(phrase.lower().split())
    return lexicons.paraphrases.get(key, ())
