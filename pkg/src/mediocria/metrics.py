"""Style measurements, calibration targets and per-document budgets.

All ratio metrics share the word-token denominator (Word and Number kinds);
punctuation tokens never count as words.  Word types fold case.  Calibration
averages are word-token weighted, so long documents pull the target harder
than short ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .textmodel import CaseShape, Document, Segment, Sentence, TokenKind

__all__ = [
    "RATIO_METRICS",
    "CONTROLLED_METRICS",
    "DEFAULT_EPSILON",
    "DEFAULT_LENGTH_EPSILON",
    "StyleMetrics",
    "CalibrationProfile",
    "BudgetEntry",
    "Budget",
    "compute_metrics",
    "calibrate",
    "metric_delta",
    "update_budget",
    "save_profile",
    "load_profile",
    "DegenerateScopeError",
    "EmptyCorpusError",
]

# the eight ratio metrics, in reporting order
RATIO_METRICS = (
    "punct_ratio",
    "uppercase_ratio",
    "stopword_ratio",
    "type_token_ratio",
    "noun_ratio",
    "adjective_ratio",
    "adverb_ratio",
    "verb_ratio",
)

# everything the obfuscation budget watches for overshoot
CONTROLLED_METRICS = ("avg_sentence_len",) + RATIO_METRICS

DEFAULT_EPSILON = 0.02          # tolerance band for ratio metrics
DEFAULT_LENGTH_EPSILON = 2.0    # tolerance band for avg_sentence_len, in words


class DegenerateScopeError(ValueError):
    """Raised when a scope has no word tokens or no sentences to measure."""


class EmptyCorpusError(ValueError):
    """Raised when calibration receives no usable documents."""


@dataclass
class StyleMetrics:
    avg_sentence_len: float
    punct_ratio: float
    uppercase_ratio: float
    stopword_ratio: float
    type_token_ratio: float
    noun_ratio: float
    adjective_ratio: float
    verb_ratio: float
    adverb_ratio: float
    word_frequencies: dict[str, int] = field(default_factory=dict)
    word_token_count: int = 0
    sentence_count: int = 0

    def value(self, name: str) -> float:
        return getattr(self, name)


@dataclass
class CalibrationProfile:
    targets: StyleMetrics
    source_ids: list[str] = field(default_factory=list)
    total_word_tokens: int = 0

    def target(self, name: str) -> float:
        return self.targets.value(name)


def _sentences_of(scope) -> list[Sentence]:
    if isinstance(scope, Document):
        return scope.sentences
    if isinstance(scope, Segment):
        return scope.sentences
    if isinstance(scope, Sentence):
        return [scope]
    return list(scope)


def compute_metrics(scope) -> StyleMetrics:
    """Measure a tagged Document, Segment or sentence list.

    Raises DegenerateScopeError when there is nothing to measure: zero
    sentences or zero word tokens.
    """
    sentences = _sentences_of(scope)
    if not sentences:
        raise DegenerateScopeError("no sentences in scope")

    words = 0
    punct = 0
    upper = 0
    stop = 0
    pos_counts = {"Noun": 0, "Verb": 0, "Adjective": 0, "Adverb": 0}
    freqs: dict[str, int] = {}

    for sent in sentences:
        for tok in sent.tokens:
            if tok.kind is TokenKind.PUNCTUATION:
                punct += 1
                continue
            if not tok.is_word:
                continue
            words += 1
            low = tok.surface.lower()
            freqs[low] = freqs.get(low, 0) + 1
            if tok.case_shape is CaseShape.ALL_CAPS:
                upper += 1
            if tok.is_stopword:
                stop += 1
            if tok.pos is not None and tok.pos.value in pos_counts:
                pos_counts[tok.pos.value] += 1

    if words == 0:
        raise DegenerateScopeError("no word tokens in scope")

    return StyleMetrics(
        avg_sentence_len=words / len(sentences),
        punct_ratio=punct / words,
        uppercase_ratio=upper / words,
        stopword_ratio=stop / words,
        type_token_ratio=len(freqs) / words,
        noun_ratio=pos_counts["Noun"] / words,
        adjective_ratio=pos_counts["Adjective"] / words,
        verb_ratio=pos_counts["Verb"] / words,
        adverb_ratio=pos_counts["Adverb"] / words,
        word_frequencies=freqs,
        word_token_count=words,
        sentence_count=len(sentences),
    )


# ---------------------------------------------------------------------------
# calibration

def _round6(x: float) -> float:
    return round(x, 6)


def calibrate(collections: dict[str, list[Document]]) -> CalibrationProfile:
    """Word-token-weighted mean of per-document metrics over all collections.

    `collections` maps a source id (e.g. a corpus directory name) to its
    parsed documents.  Documents that cannot be measured are skipped; an
    entirely unusable input raises EmptyCorpusError.
    """
    total = 0
    sums = {name: 0.0 for name in CONTROLLED_METRICS}
    source_ids = []
    for source_id, docs in collections.items():
        source_ids.append(source_id)
        for doc in docs:
            try:
                m = compute_metrics(doc)
            except DegenerateScopeError:
                continue
            w = m.word_token_count
            total += w
            for name in CONTROLLED_METRICS:
                sums[name] += w * m.value(name)
    if total == 0:
        raise EmptyCorpusError("no measurable documents in calibration input")
    targets = StyleMetrics(
        avg_sentence_len=_round6(sums["avg_sentence_len"] / total),
        punct_ratio=_round6(sums["punct_ratio"] / total),
        uppercase_ratio=_round6(sums["uppercase_ratio"] / total),
        stopword_ratio=_round6(sums["stopword_ratio"] / total),
        type_token_ratio=_round6(sums["type_token_ratio"] / total),
        noun_ratio=_round6(sums["noun_ratio"] / total),
        adjective_ratio=_round6(sums["adjective_ratio"] / total),
        verb_ratio=_round6(sums["verb_ratio"] / total),
        adverb_ratio=_round6(sums["adverb_ratio"] / total),
    )
    return CalibrationProfile(targets, sorted(source_ids), total)


# ---------------------------------------------------------------------------
# profile serialization: `# comment` lines, then metric_name<TAB>value lines

def save_profile(profile: CalibrationProfile, path) -> None:
    lines = ["# style calibration profile"]
    for sid in profile.source_ids:
        lines.append(f"# source: {sid}")
    lines.append(f"# total_word_tokens: {profile.total_word_tokens}")
    for name in CONTROLLED_METRICS:
        lines.append(f"{name}\t{profile.target(name):.6f}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_profile(path) -> CalibrationProfile:
    values: dict[str, float] = {}
    source_ids: list[str] = []
    total = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if line.lstrip().startswith("#"):
                body = line.lstrip()[1:].strip()
                if body.startswith("source:"):
                    source_ids.append(body[len("source:"):].strip())
                elif body.startswith("total_word_tokens:"):
                    total = int(body[len("total_word_tokens:"):].strip())
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected name<TAB>value")
            name, text = parts
            if name not in CONTROLLED_METRICS:
                raise ValueError(f"{path}:{lineno}: unknown metric {name!r}")
            values[name] = float(text)
    missing = [n for n in CONTROLLED_METRICS if n not in values]
    if missing:
        raise ValueError(f"{path}: missing metrics: {', '.join(missing)}")
    targets = StyleMetrics(
        avg_sentence_len=values["avg_sentence_len"],
        punct_ratio=values["punct_ratio"],
        uppercase_ratio=values["uppercase_ratio"],
        stopword_ratio=values["stopword_ratio"],
        type_token_ratio=values["type_token_ratio"],
        noun_ratio=values["noun_ratio"],
        adjective_ratio=values["adjective_ratio"],
        verb_ratio=values["verb_ratio"],
        adverb_ratio=values["adverb_ratio"],
    )
    return CalibrationProfile(targets, source_ids, total)


# ---------------------------------------------------------------------------
# budgets

@dataclass
class BudgetEntry:
    name: str
    target: float
    current: float
    epsilon: float
    frozen: bool = False
    overshoot: bool = False

    @property
    def delta(self) -> float:
        """Signed distance still to travel: target minus current."""
        return self.target - self.current

    @property
    def satisfied(self) -> bool:
        return abs(self.delta) <= self.epsilon

    @property
    def active(self) -> bool:
        return not self.frozen and not self.satisfied


@dataclass
class Budget:
    entries: dict[str, BudgetEntry]

    def entry(self, name: str) -> BudgetEntry:
        return self.entries[name]

    def delta(self, name: str) -> float:
        return self.entries[name].delta

    def active_metrics(self) -> list[str]:
        return [n for n in CONTROLLED_METRICS if self.entries[n].active]


def metric_delta(current: StyleMetrics,
                 profile: CalibrationProfile,
                 epsilon: float = DEFAULT_EPSILON,
                 length_epsilon: float = DEFAULT_LENGTH_EPSILON) -> Budget:
    """Per-metric signed deltas toward the profile targets.

    Ratio metrics share one tolerance; average sentence length has its own,
    expressed in words.  A metric within tolerance is satisfied and its
    transform family is not scheduled.
    """
    entries = {}
    for name in CONTROLLED_METRICS:
        eps = length_epsilon if name == "avg_sentence_len" else epsilon
        entries[name] = BudgetEntry(
            name=name,
            target=profile.target(name),
            current=current.value(name),
            epsilon=eps,
        )
    return Budget(entries)


def update_budget(budget: Budget, measured: StyleMetrics) -> Budget:
    """Refresh deltas after a pass; freeze satisfied or overshot metrics.

    Freezing is monotone: once frozen a metric never thaws.  A sign flip
    between the old and new delta means the pass crossed the target; the
    metric freezes with its overshoot flag set.
    """
    new_entries = {}
    for name, old in budget.entries.items():
        entry = BudgetEntry(
            name=name,
            target=old.target,
            current=measured.value(name),
            epsilon=old.epsilon,
            frozen=old.frozen,
            overshoot=old.overshoot,
        )
        if not entry.frozen:
            if entry.satisfied:
                entry.frozen = True
            elif old.delta != 0 and entry.delta != 0 \
                    and math.copysign(1, old.delta) != math.copysign(1, entry.delta):
                entry.frozen = True
                entry.overshoot = True
        new_entries[name] = entry
    return Budget(new_entries)
