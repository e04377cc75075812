"""Safety checks: does a simple attributor still recognize the author?

The attributor is deliberately shallow: per-author profiles of the 300 most
frequent character 3-grams (case kept as written), nearest profile by cosine
similarity.  It exists to measure how much the rewrite hurts attribution,
not to be a strong classifier.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .metrics import RATIO_METRICS, CalibrationProfile, StyleMetrics

__all__ = [
    "Attributor",
    "SafetyReport",
    "InsufficientAuthorsError",
    "EmptyTextError",
    "SizeMismatchError",
    "ngram_profile",
    "train_attributor",
    "attribute",
    "accuracy",
    "safety_drop",
    "load_author_corpus",
    "metric_report",
    "corpus_report",
]

NGRAM_SIZE = 3
PROFILE_SIZE = 300


class InsufficientAuthorsError(ValueError):
    """Fewer than two authors; attribution is meaningless."""


class EmptyTextError(ValueError):
    """No character n-grams could be extracted."""


class SizeMismatchError(ValueError):
    """Original and obfuscated evaluation sets differ in length."""


def ngram_profile(text: str, size: int = NGRAM_SIZE,
                  top: int = PROFILE_SIZE) -> dict[str, float]:
    """Normalized frequencies of the `top` most common character n-grams.

    Whitespace runs collapse to single spaces so formatting differences do
    not register as style.  Ties on count break by the gram itself.
    """
    collapsed = " ".join(text.split())
    grams = Counter(collapsed[i:i + size] for i in range(len(collapsed) - size + 1))
    if not grams:
        raise EmptyTextError("text too short for %d-grams" % size)
    total = sum(grams.values())
    ranked = sorted(grams.items(), key=lambda kv: (-kv[1], kv[0]))[:top]
    return {g: c / total for g, c in ranked}


def _cosine(p: dict[str, float], q: dict[str, float]) -> float:
    if len(q) < len(p):
        p, q = q, p
    dot = sum(v * q[g] for g, v in p.items() if g in q)
    np = math.sqrt(sum(v * v for v in p.values()))
    nq = math.sqrt(sum(v * v for v in q.values()))
    if np == 0.0 or nq == 0.0:
        return 0.0
    return dot / (np * nq)


@dataclass
class Attributor:
    profiles: dict[str, dict[str, float]]

    @property
    def authors(self) -> list[str]:
        return sorted(self.profiles)


def train_attributor(corpus: dict[str, list[str]]) -> Attributor:
    """One profile per author from the concatenation of their documents."""
    if len(corpus) < 2:
        raise InsufficientAuthorsError(
            "need at least 2 authors, got %d" % len(corpus))
    profiles = {}
    for author, texts in corpus.items():
        joined = "\n".join(texts)
        profiles[author] = ngram_profile(joined)
    return Attributor(profiles)


def attribute(attributor: Attributor, text: str) -> str:
    """Closest author profile by cosine; ties go to the smaller author id."""
    probe = ngram_profile(text)
    best_author = None
    best_score = -1.0
    for author in attributor.authors:
        score = _cosine(probe, attributor.profiles[author])
        if score > best_score:
            best_author = author
            best_score = score
    return best_author


def accuracy(attributor: Attributor, labeled: list[tuple[str, str]]) -> float:
    if not labeled:
        raise EmptyTextError("no labeled documents to score")
    hits = sum(1 for author, text in labeled
               if attribute(attributor, text) == author)
    return hits / len(labeled)


@dataclass
class SafetyReport:
    accuracy_before: float
    accuracy_after: float

    @property
    def drop(self) -> float:
        return self.accuracy_before - self.accuracy_after


def safety_drop(attributor: Attributor,
                originals: list[tuple[str, str]],
                obfuscated: list[tuple[str, str]]) -> SafetyReport:
    """Attribution accuracy on held-out docs before and after rewriting.

    The two lists pair up by position: same true author, same document.
    """
    if len(originals) != len(obfuscated):
        raise SizeMismatchError(
            "%d originals vs %d obfuscations" % (len(originals), len(obfuscated)))
    return SafetyReport(accuracy(attributor, originals),
                        accuracy(attributor, obfuscated))


def load_author_corpus(directory) -> dict[str, list[tuple[str, str]]]:
    """Read corpus/<author>/<doc>.txt into {author: [(doc_id, text), ...]}.

    Authors and documents come back sorted so iteration order is stable.
    """
    root = Path(directory)
    corpus: dict[str, list[tuple[str, str]]] = {}
    for author_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        docs = []
        for doc_path in sorted(author_dir.glob("*.txt")):
            docs.append((doc_path.stem, doc_path.read_text(encoding="utf-8")))
        if docs:
            corpus[author_dir.name] = docs
    return corpus


# ---------------------------------------------------------------------------
# metric movement report

_REPORT_METRICS = ("avg_sentence_len",) + RATIO_METRICS


def corpus_report(befores: list[StyleMetrics], afters: list[StyleMetrics],
                  profile: CalibrationProfile, fmt: str = "table") -> str:
    """Mean absolute distance to target per metric, before vs after.

    Distances are averaged over documents with equal weight; a shrinking
    mean distance is the whole point of the rewrite.
    """
    if len(befores) != len(afters):
        raise SizeMismatchError(
            "%d before vs %d after" % (len(befores), len(afters)))
    if not befores:
        raise EmptyTextError("no documents to report on")
    rows = [("metric", "target", "mean_dist_before", "mean_dist_after")]
    n = len(befores)
    for name in _REPORT_METRICS:
        target = profile.target(name)
        db = sum(abs(m.value(name) - target) for m in befores) / n
        da = sum(abs(m.value(name) - target) for m in afters) / n
        fmtv = "%.2f" if name == "avg_sentence_len" else "%.4f"
        rows.append((name, fmtv % target, fmtv % db, fmtv % da))
    if fmt == "tsv":
        return "\n".join("\t".join(row) for row in rows)
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])]
        cells += [row[i].rjust(widths[i]) for i in range(1, 4)]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def metric_report(before: StyleMetrics, after: StyleMetrics,
                  profile: CalibrationProfile, fmt: str = "table") -> str:
    """Before/after/target listing for every steered metric.

    fmt "table" pads columns for reading; "tsv" is one tab-separated row per
    metric for machine use.
    """
    rows = [("metric", "before", "after", "target")]
    for name in _REPORT_METRICS:
        fmtv = "%.1f" if name == "avg_sentence_len" else "%.4f"
        rows.append((name, fmtv % before.value(name), fmtv % after.value(name),
                     fmtv % profile.target(name)))
    if fmt == "tsv":
        return "\n".join("\t".join(row) for row in rows)
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])]
        cells += [row[i].rjust(widths[i]) for i in range(1, 4)]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)
