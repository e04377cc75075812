"""Document obfuscation: plan, budgeted passes, general stage, noise stage.

The controller keeps live count estimates for every watched metric while a
pass runs.  Each candidate edit is offered with its exact token deltas; an
edit that would push any watched metric further from its target than where
the document started (or than the tolerance band, whichever is wider) is
refused.  That single rule is what prevents overshoot: transforms move their
own metric toward the average and are stopped at the band edge, and side
effects on other metrics are capped at the document's original distance.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .lexicons import LexiconBundle
from .metrics import (
    Budget,
    CalibrationProfile,
    CONTROLLED_METRICS,
    DEFAULT_EPSILON,
    DEFAULT_LENGTH_EPSILON,
    StyleMetrics,
    compute_metrics,
    metric_delta,
    update_budget,
)
from .textmodel import (
    CaseShape,
    Document,
    Token,
    TokenKind,
    parse_text,
    render,
    render_segment,
    reparse_segment,
)
from . import transforms as T
from .transforms import TransformKind, TransformRecord

__all__ = [
    "ObfuscationConfig",
    "ObfuscationEntry",
    "ObfuscationResult",
    "LiveBudget",
    "plan",
    "Schedule",
    "MetricStep",
    "obfuscate_document",
    "obfuscate_text",
    "document_rng",
    "write_result",
    "GENERAL_STAGE",
    "NOISE_STAGE",
]

OOV_METRIC = "oov_ratio"


@dataclass(frozen=True)
class ObfuscationConfig:
    seed: int = 0
    epsilon: float = DEFAULT_EPSILON
    length_epsilon: float = DEFAULT_LENGTH_EPSILON
    max_passes: int = 3
    paraphrase_probability: float = 0.5
    noise_probability: float = 0.15
    oov_target: float = 0.02
    oov_epsilon: float = 0.02
    disabled: frozenset = frozenset()

    def enabled(self, kind: TransformKind) -> bool:
        return kind not in self.disabled


def document_rng(seed: int, doc_id: str) -> random.Random:
    """A per-document stream: same (seed, id) always yields the same draws."""
    digest = hashlib.sha256(f"{seed}:{doc_id}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


# ---------------------------------------------------------------------------
# live counting

def _oov_candidate(tok: Token, vocab) -> bool:
    s = tok.surface
    return (tok.kind is TokenKind.WORD and tok.case_shape is CaseShape.LOWER
            and len(s) >= 3 and s.isalpha() and not tok.proper)


@dataclass
class _Counts:
    words: int = 0
    sentences: int = 0
    punct: int = 0
    upper: int = 0
    stop: int = 0
    noun: int = 0
    verb: int = 0
    adjective: int = 0
    adverb: int = 0
    oov: int = 0
    freqs: dict = field(default_factory=dict)
    types: int = 0


def _count_document(document: Document, vocab) -> _Counts:
    c = _Counts()
    for sent in document.sentences:
        c.sentences += 1
        for tok in sent.tokens:
            _add_token(c, tok, vocab, +1)
    c.types = len(c.freqs)
    return c


def _add_token(c: _Counts, tok: Token, vocab, sign: int) -> None:
    if tok.kind is TokenKind.PUNCTUATION:
        c.punct += sign
        return
    if not tok.is_word:
        return
    c.words += sign
    if tok.case_shape is CaseShape.ALL_CAPS:
        c.upper += sign
    if tok.is_stopword:
        c.stop += sign
    pos = tok.pos.value if tok.pos is not None else ""
    if pos == "Noun":
        c.noun += sign
    elif pos == "Verb":
        c.verb += sign
    elif pos == "Adjective":
        c.adjective += sign
    elif pos == "Adverb":
        c.adverb += sign
    if _oov_candidate(tok, vocab) and tok.surface.lower() not in vocab:
        c.oov += sign
    low = tok.surface.lower()
    n = c.freqs.get(low, 0) + sign
    if n <= 0:
        c.freqs.pop(low, None)
    else:
        c.freqs[low] = n


class LiveBudget:
    """Stage-scoped controller bridging transforms and the metric budget.

    Transforms see three methods: delta(name), satisfied(name) and
    try_edit(removed, added, dsent).  Bounds are anchored to the original
    document so successive stages cannot ratchet a metric away from its
    starting distance.  With `enforce` off, try_edit records the deltas
    without refusing anything; the pipeline keeps it on everywhere.
    """

    # fraction of the documented per-document tolerance spent here; the rest
    # absorbs drift from the unconditional rewrites that follow the passes
    RATIO_SLACK = 0.004

    def __init__(self, budget: Budget, document: Document,
                 baseline: StyleMetrics, config: ObfuscationConfig,
                 lexicons: LexiconBundle):
        self.budget = budget
        self.config = config
        self.vocab = lexicons.known_vocabulary
        self.counts = _count_document(document, self.vocab)
        self.enforce = True
        self.bounds: dict[str, float] = {}
        for name in CONTROLLED_METRICS:
            entry = budget.entries[name]
            slack = 0.0 if name == "avg_sentence_len" else self.RATIO_SLACK
            self.bounds[name] = max(entry.epsilon,
                                    abs(baseline.value(name) - entry.target)) + slack

    # -- estimates ---------------------------------------------------------

    def _estimate(self, c: _Counts, name: str) -> float:
        if c.words == 0 or c.sentences == 0:
            return 0.0
        if name == "avg_sentence_len":
            return c.words / c.sentences
        if name == "punct_ratio":
            return c.punct / c.words
        if name == "uppercase_ratio":
            return c.upper / c.words
        if name == "stopword_ratio":
            return c.stop / c.words
        if name == "type_token_ratio":
            return c.types / c.words
        if name == "noun_ratio":
            return c.noun / c.words
        if name == "adjective_ratio":
            return c.adjective / c.words
        if name == "verb_ratio":
            return c.verb / c.words
        if name == "adverb_ratio":
            return c.adverb / c.words
        if name == OOV_METRIC:
            return c.oov / c.words
        raise KeyError(name)

    def value(self, name: str) -> float:
        return self._estimate(self.counts, name)

    def target(self, name: str) -> float:
        if name == OOV_METRIC:
            return self.config.oov_target
        return self.budget.entries[name].target

    def epsilon(self, name: str) -> float:
        if name == OOV_METRIC:
            return self.config.oov_epsilon
        return self.budget.entries[name].epsilon

    def delta(self, name: str) -> float:
        return self.target(name) - self.value(name)

    def satisfied(self, name: str) -> bool:
        return abs(self.delta(name)) <= self.epsilon(name)

    # -- edits -------------------------------------------------------------

    def _apply(self, c: _Counts, removed: list[Token], added: list[Token],
               dsent: int) -> _Counts:
        for tok in removed:
            _add_token(c, tok, self.vocab, -1)
        for tok in added:
            _add_token(c, tok, self.vocab, +1)
        c.sentences += dsent
        c.types = len(c.freqs)
        return c

    def try_edit(self, removed: list[Token], added: list[Token],
                 dsent: int = 0) -> bool:
        trial = _Counts(**{**self.counts.__dict__, "freqs": dict(self.counts.freqs)})
        self._apply(trial, removed, added, dsent)
        if trial.words <= 0 or trial.sentences <= 0:
            return False
        if self.enforce:
            for name in CONTROLLED_METRICS:
                est = self._estimate(trial, name)
                if abs(est - self.target(name)) > self.bounds[name] + 1e-9:
                    return False
        self.counts = trial
        return True


# ---------------------------------------------------------------------------
# planning

@dataclass
class MetricStep:
    metric: str
    direction: int
    kinds: tuple[TransformKind, ...]


@dataclass
class Schedule:
    metric_steps: list[MetricStep]
    general: list[TransformKind]
    noise: list[TransformKind]


GENERAL_STAGE = (
    TransformKind.PARAPHRASE,
    TransformKind.CONTRACTION_EXPAND,
    TransformKind.EQUATION_VERBALIZE,
    TransformKind.SYMBOL_ABBREV_EXPAND,
    TransformKind.NUMBER_TO_WORDS,
    TransformKind.POSSESSIVE_RESTRUCTURE,
)

NOISE_STAGE = (
    TransformKind.SPELLING_VARIANT_SWITCH,
    TransformKind.DISCOURSE_MARKER_INSERT,
)

# metric-driven stage, fixed order; per metric: transforms for each direction
_METRIC_FAMILIES = (
    ("avg_sentence_len", {
        +1: (TransformKind.MERGE_SENTENCES,),
        -1: (TransformKind.SPLIT_SENTENCE,),
    }),
    ("stopword_ratio", {
        +1: (TransformKind.STOPWORD_REPLACE,),
        -1: (TransformKind.STOPWORD_REMOVE, TransformKind.STOPWORD_REPLACE),
    }),
    ("punct_ratio", {
        +1: (TransformKind.PUNCT_INSERT, TransformKind.PUNCT_REDUNDANT),
        -1: (TransformKind.PUNCT_REMOVE,),
    }),
    ("type_token_ratio", {
        +1: (TransformKind.DEFINITION_SUB,),
        -1: (TransformKind.SYNONYM_SUB,),
    }),
    ("uppercase_ratio", {
        +1: (),                    # nothing raises the uppercase share
        -1: (TransformKind.LOWERCASE_ALL_CAPS,),
    }),
    (OOV_METRIC, {
        +1: (TransformKind.SPELL_CORRUPT,),
        -1: (TransformKind.SPELL_CORRECT,),
    }),
)


def _schedule(budget: Budget, config: ObfuscationConfig,
              oov_ratio: Optional[float] = None) -> Schedule:
    steps: list[MetricStep] = []
    for metric, families in _METRIC_FAMILIES:
        if metric == OOV_METRIC:
            if oov_ratio is None:
                continue
            delta = config.oov_target - oov_ratio
            if abs(delta) <= config.oov_epsilon:
                continue
        else:
            entry = budget.entries[metric]
            if not entry.active:
                continue
            delta = entry.delta
        direction = 1 if delta > 0 else -1
        kinds = tuple(k for k in families.get(direction, ()) if config.enabled(k))
        if kinds:
            steps.append(MetricStep(metric, direction, kinds))
    general = [k for k in GENERAL_STAGE if config.enabled(k)]
    noise = [k for k in NOISE_STAGE if config.enabled(k)]
    return Schedule(steps, general, noise)


def plan(doc_metrics: StyleMetrics, profile: CalibrationProfile,
         config: ObfuscationConfig,
         oov_ratio: Optional[float] = None) -> tuple[Budget, Schedule]:
    """Budget plus ordered transform schedule for one document.

    Only metric families whose delta exceeds the tolerance band appear in the
    metric-driven stage; the general and noise stages always run (minus
    disabled transforms).
    """
    budget = metric_delta(doc_metrics, profile, config.epsilon, config.length_epsilon)
    return budget, _schedule(budget, config, oov_ratio)


# ---------------------------------------------------------------------------
# results

@dataclass
class ObfuscationEntry:
    original: str
    obfuscation: str
    start: int
    end: int
    entry_id: int

    def to_json_obj(self) -> dict:
        return {
            "original": self.original,
            "obfuscation": self.obfuscation,
            "original-start-charpos": self.start,
            "original-end-charpos": self.end,
            "obfuscation-id": self.entry_id,
        }


@dataclass
class ObfuscationResult:
    doc_id: str
    entries: list[ObfuscationEntry]
    audit: list[TransformRecord]
    metrics_before: StyleMetrics
    metrics_after: StyleMetrics
    obfuscated_text: str = ""
    notes: list[str] = field(default_factory=list)
    passes_run: int = 0


# ---------------------------------------------------------------------------
# the pipeline

def _run_metric_step(step: MetricStep, document: Document, live: LiveBudget,
                     rng: random.Random, lexicons: LexiconBundle,
                     config: ObfuscationConfig,
                     doc_freqs: dict) -> list[TransformRecord]:
    records: list[TransformRecord] = []
    for idx, seg in enumerate(document.segments):
        if live.satisfied(step.metric):
            break
        kwargs = {"segment_index": idx}
        if step.metric == "avg_sentence_len":
            op = T.merge_sentences if step.direction > 0 else T.split_sentence
        elif step.metric == "stopword_ratio":
            op = T.adjust_stopwords
            kwargs["direction"] = step.direction
            kwargs["enabled_kinds"] = set(step.kinds)
        elif step.metric == "punct_ratio":
            op = T.adjust_punctuation
            kwargs["direction"] = step.direction
        elif step.metric == "type_token_ratio":
            op = T.substitute_words
            kwargs["direction"] = step.direction
            kwargs["doc_frequencies"] = doc_freqs
        elif step.metric == "uppercase_ratio":
            op = T.normalize_uppercase
        elif step.metric == OOV_METRIC:
            op = T.correct_spelling if step.direction < 0 else T.inject_misspellings
        else:
            continue
        _, recs = op(seg, live, rng, lexicons, **kwargs)
        records.extend(recs)
    return records


_GENERAL_OPS: dict[TransformKind, Callable] = {
    TransformKind.PARAPHRASE: T.apply_paraphrases,
    TransformKind.CONTRACTION_EXPAND: T.expand_contractions,
    TransformKind.EQUATION_VERBALIZE: T.verbalize_equations,
    TransformKind.SYMBOL_ABBREV_EXPAND: T.replace_symbols_abbreviations,
    TransformKind.NUMBER_TO_WORDS: T.numbers_to_words,
    TransformKind.POSSESSIVE_RESTRUCTURE: T.restructure_possessives,
}

_NOISE_OPS: dict[TransformKind, Callable] = {
    TransformKind.SPELLING_VARIANT_SWITCH: T.switch_spelling_variant,
    TransformKind.DISCOURSE_MARKER_INSERT: T.insert_discourse_marker,
}



def obfuscate_document(document: Document, profile: CalibrationProfile,
                       lexicons: LexiconBundle,
                       config: ObfuscationConfig = ObfuscationConfig()
                       ) -> ObfuscationResult:
    """Obfuscate a parsed document in place and report everything done.

    Stages: up to `max_passes` metric-driven passes with re-measurement in
    between, then the general rewrites once, then noise once.  All draws come
    from one per-document stream seeded by (config.seed, doc_id).
    """
    rng = document_rng(config.seed, document.doc_id)
    baseline = compute_metrics(document)
    originals = [(seg.start, seg.end, document.raw_text[seg.start:seg.end])
                 for seg in document.segments]

    audit: list[TransformRecord] = []
    budget, schedule = None, None
    passes_run = 0

    for pass_no in range(config.max_passes):
        current = compute_metrics(document)
        if budget is None:
            budget = metric_delta(current, profile, config.epsilon,
                                  config.length_epsilon)
        else:
            budget = update_budget(budget, current)
        live = LiveBudget(budget, document, baseline, config, lexicons)
        schedule = _schedule(budget, config, live.value(OOV_METRIC))
        if not schedule.metric_steps:
            break
        passes_run += 1
        pass_records: list[TransformRecord] = []
        for step in schedule.metric_steps:
            pass_records.extend(_run_metric_step(
                step, document, live, rng, lexicons, config, current.word_frequencies))
        audit.extend(pass_records)
        for seg in document.segments:
            reparse_segment(seg, lexicons)
        if not pass_records:
            break

    # final freeze bookkeeping, then the unconditional stages
    current = compute_metrics(document)
    if budget is None:
        budget = metric_delta(current, profile, config.epsilon, config.length_epsilon)
    else:
        budget = update_budget(budget, current)
    live = LiveBudget(budget, document, baseline, config, lexicons)
    if schedule is None:
        schedule = _schedule(budget, config, live.value(OOV_METRIC))

    # the general rewrites are scheduled unconditionally, but every edit still
    # answers to the live budget so late drift cannot break the per-document
    # bounds the passes maintained
    for kind in schedule.general:
        op = _GENERAL_OPS[kind]
        for idx, seg in enumerate(document.segments):
            kwargs = {"segment_index": idx}
            if kind is TransformKind.PARAPHRASE:
                kwargs["probability"] = config.paraphrase_probability
            _, recs = op(seg, live, rng, lexicons, **kwargs)
            audit.extend(recs)
    for seg in document.segments:
        reparse_segment(seg, lexicons)

    live.enforce = True
    for kind in schedule.noise:
        op = _NOISE_OPS[kind]
        for idx, seg in enumerate(document.segments):
            _, recs = op(seg, live, rng, lexicons,
                         segment_index=idx,
                         probability=config.noise_probability)
            audit.extend(recs)
    for seg in document.segments:
        reparse_segment(seg, lexicons)

    metrics_after = compute_metrics(document)
    notes = []
    for entry in budget.entries.values():
        if entry.overshoot:
            notes.append(f"{entry.name}: crossed its target during a pass; frozen")
    leftovers = sorted({s for seg in document.segments
                        for s in T.unsupported_numerals(seg)})
    if leftovers:
        notes.append("unsupported numerals left as-is: " + ", ".join(leftovers))

    entries = []
    for i, (start, end, original) in enumerate(originals):
        entries.append(ObfuscationEntry(
            original=original,
            obfuscation=render_segment(document.segments[i]),
            start=start,
            end=end,
            entry_id=i + 1,
        ))
    return ObfuscationResult(document.doc_id, entries, audit, baseline,
                             metrics_after, render(document.segments),
                             notes, passes_run)


def obfuscate_text(doc_id: str, text: str, profile: CalibrationProfile,
                   lexicons: LexiconBundle,
                   config: ObfuscationConfig = ObfuscationConfig()
                   ) -> ObfuscationResult:
    document = parse_text(doc_id, text, lexicons)
    return obfuscate_document(document, profile, lexicons, config)


# ---------------------------------------------------------------------------
# serialization

def write_result(result: ObfuscationResult, out_dir) -> Path:
    """Write obfuscation.json, obfuscation.txt and audit.jsonl under the
    document's own directory; returns that directory."""
    doc_dir = Path(out_dir) / result.doc_id
    doc_dir.mkdir(parents=True, exist_ok=True)
    payload = [e.to_json_obj() for e in result.entries]
    with open(doc_dir / "obfuscation.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2)
        fh.write("\n")
    (doc_dir / "obfuscation.txt").write_text(result.obfuscated_text,
                                             encoding="utf-8")
    with open(doc_dir / "audit.jsonl", "w", encoding="utf-8") as fh:
        for rec in result.audit:
            obj = {
                "kind": rec.kind.value,
                "segment": rec.segment_index,
                "before": rec.before,
                "after": rec.after,
                "metric_touch": rec.metric_touch,
            }
            if rec.note:
                obj["note"] = rec.note
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
    return doc_dir
