"""Metric measurement, calibration targets, profiles and budgets."""

from __future__ import annotations

import pytest

from mediocria.metrics import (
    CONTROLLED_METRICS,
    DEFAULT_EPSILON,
    DEFAULT_LENGTH_EPSILON,
    DegenerateScopeError,
    EmptyCorpusError,
    RATIO_METRICS,
    calibrate,
    compute_metrics,
    load_profile,
    metric_delta,
    save_profile,
    update_budget,
)
from mediocria.textmodel import Document, parse_text

from support import make_metrics, make_profile

# ---------------------------------------------------------------------------
# measurement oracles, counted by hand

def test_hand_counted_document():
    # 9 word tokens over 2 sentences; PURRED is the only all-caps token
    doc = parse_text("t", "The cat sat on the mat. It PURRED loudly!", None)
    m = compute_metrics(doc)
    assert m.word_token_count == 9
    assert m.sentence_count == 2
    assert m.avg_sentence_len == 9 / 2
    assert m.punct_ratio == 2 / 9
    assert m.uppercase_ratio == 1 / 9
    assert m.stopword_ratio == 0.0          # no lexicons, no stopword flags
    assert m.type_token_ratio == 8 / 9      # "the" repeats once
    # cat, mat nouns; sat, purred verbs; loudly adverb; no adjectives
    assert m.noun_ratio == 2 / 9
    assert m.verb_ratio == 2 / 9
    assert m.adverb_ratio == 1 / 9
    assert m.adjective_ratio == 0.0
    assert m.word_frequencies == {
        "the": 2, "cat": 1, "sat": 1, "on": 1, "mat": 1,
        "it": 1, "purred": 1, "loudly": 1,
    }


def test_stopword_ratio_uses_the_lexicon(lexicons):
    doc = parse_text("t", "The cat sat on the mat.", lexicons)
    assert compute_metrics(doc).stopword_ratio == 3 / 6


def test_word_types_fold_case():
    doc = parse_text("t", "Dog dog DOG.", None)
    m = compute_metrics(doc)
    assert m.type_token_ratio == 1 / 3
    assert m.uppercase_ratio == 1 / 3


def test_numbers_count_as_word_tokens():
    m = compute_metrics(parse_text("t", "Take 5 now.", None))
    assert m.word_token_count == 3


def test_degenerate_scopes_raise():
    with pytest.raises(DegenerateScopeError):
        compute_metrics([])
    with pytest.raises(DegenerateScopeError):
        compute_metrics(parse_text("t", "", None))
    # punctuation-only sentences carry no word tokens
    doc = parse_text("t", "... !!!", None)
    with pytest.raises(DegenerateScopeError):
        compute_metrics(doc)


def test_value_accessor_matches_fields():
    m = make_metrics(punct_ratio=0.31)
    assert m.value("punct_ratio") == 0.31
    assert m.value("avg_sentence_len") == 15.0


# ---------------------------------------------------------------------------
# calibration

def test_calibration_weights_by_word_tokens():
    doc_a = parse_text("a0", "Cat sat. Dog ran.", None)          # 4 words, asl 2
    doc_b = parse_text("b0", "Ash bay cod day elm fig gem hut.", None)  # 8, asl 8
    profile = calibrate({"b": [doc_b], "a": [doc_a]})
    assert profile.target("avg_sentence_len") == (4 * 2 + 8 * 8) / 12
    # punct: 2/4 and 1/8, token-weighted mean lands on 0.25
    assert profile.target("punct_ratio") == 0.25
    assert profile.total_word_tokens == 12
    assert profile.source_ids == ["a", "b"]


def test_calibration_skips_degenerate_documents():
    good = parse_text("g", "Cat sat. Dog ran.", None)
    empty = Document("e", "", [])
    profile = calibrate({"c": [empty, good]})
    assert profile.total_word_tokens == 4


def test_calibration_with_nothing_usable_raises():
    with pytest.raises(EmptyCorpusError):
        calibrate({})
    with pytest.raises(EmptyCorpusError):
        calibrate({"c": [Document("e", "", [])]})


def test_targets_are_rounded_to_six_places():
    doc = parse_text("a", "One two three four five six seven.", None)
    profile = calibrate({"c": [doc]})
    for name in RATIO_METRICS:
        v = profile.target(name)
        assert v == round(v, 6)


# ---------------------------------------------------------------------------
# profile files

def test_profile_round_trip(tmp_path):
    doc = parse_text("a", "The cat sat on the mat. It purred loudly.", None)
    profile = calibrate({"pets": [doc]})
    path = tmp_path / "style.profile"
    save_profile(profile, path)
    loaded = load_profile(path)
    for name in CONTROLLED_METRICS:
        assert loaded.target(name) == profile.target(name)
    assert loaded.source_ids == ["pets"]
    assert loaded.total_word_tokens == profile.total_word_tokens


def test_profile_files_are_utf8_text(tmp_path):
    profile = make_profile()
    profile.source_ids = ["s"]
    path = tmp_path / "p"
    save_profile(profile, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("#")
    assert any(line.startswith("punct_ratio\t") for line in lines)


@pytest.mark.parametrize("body,match", [
    ("punct_ratio\t0.2\n", "missing metrics"),
    ("bogus_metric\t0.2\n", "unknown metric"),
    ("punct_ratio\t0.2\textra\n", "expected name<TAB>value"),
])
def test_malformed_profiles_raise(tmp_path, body, match):
    path = tmp_path / "p"
    path.write_text(body, encoding="utf-8")
    with pytest.raises(ValueError, match=match):
        load_profile(path)


# ---------------------------------------------------------------------------
# budgets

def test_metric_delta_signs_and_tolerances():
    current = make_metrics(punct_ratio=0.5, avg_sentence_len=10.0)
    profile = make_profile(punct_ratio=0.2, avg_sentence_len=15.0)
    budget = metric_delta(current, profile)
    punct = budget.entry("punct_ratio")
    assert punct.delta == pytest.approx(-0.3)
    assert punct.epsilon == DEFAULT_EPSILON
    assert punct.active
    length = budget.entry("avg_sentence_len")
    assert length.delta == pytest.approx(5.0)
    assert length.epsilon == DEFAULT_LENGTH_EPSILON
    assert length.active


def test_within_tolerance_is_satisfied_not_active():
    current = make_metrics(punct_ratio=0.21)
    budget = metric_delta(current, make_profile(punct_ratio=0.2))
    entry = budget.entry("punct_ratio")
    assert entry.satisfied
    assert not entry.active
    assert "punct_ratio" not in budget.active_metrics()


def test_custom_epsilons_apply():
    budget = metric_delta(make_metrics(), make_profile(),
                          epsilon=0.1, length_epsilon=5.0)
    assert budget.entry("noun_ratio").epsilon == 0.1
    assert budget.entry("avg_sentence_len").epsilon == 5.0


def test_update_freezes_satisfied_metrics():
    budget = metric_delta(make_metrics(punct_ratio=0.5), make_profile(punct_ratio=0.2))
    budget = update_budget(budget, make_metrics(punct_ratio=0.21))
    entry = budget.entry("punct_ratio")
    assert entry.frozen
    assert not entry.overshoot


def test_update_freezes_on_sign_flip_with_overshoot():
    budget = metric_delta(make_metrics(punct_ratio=0.5), make_profile(punct_ratio=0.2))
    # crossed the target without landing inside the band
    budget = update_budget(budget, make_metrics(punct_ratio=0.15))
    entry = budget.entry("punct_ratio")
    assert entry.frozen
    assert entry.overshoot


def test_frozen_metrics_never_thaw():
    budget = metric_delta(make_metrics(punct_ratio=0.5), make_profile(punct_ratio=0.2))
    budget = update_budget(budget, make_metrics(punct_ratio=0.21))
    budget = update_budget(budget, make_metrics(punct_ratio=0.9))
    entry = budget.entry("punct_ratio")
    assert entry.frozen
    assert not entry.active


def test_still_distant_metrics_stay_active_after_update():
    budget = metric_delta(make_metrics(punct_ratio=0.5), make_profile(punct_ratio=0.2))
    budget = update_budget(budget, make_metrics(punct_ratio=0.4))
    assert budget.entry("punct_ratio").active


def test_controlled_metrics_cover_length_plus_ratios():
    assert CONTROLLED_METRICS[0] == "avg_sentence_len"
    assert set(CONTROLLED_METRICS) == {"avg_sentence_len", *RATIO_METRICS}
    assert len(RATIO_METRICS) == 8
