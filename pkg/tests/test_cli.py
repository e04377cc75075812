"""Command line behavior: exit codes, layouts, precedence, determinism.

All invocations go through main(argv) in process; a module-scoped world
holds one calibrated profile and one obfuscated output tree.
"""

from __future__ import annotations

import json
from types import SimpleNamespace

import pytest

import corpusgen
from mediocria.cli import main


@pytest.fixture(scope="module")
def world(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_world")
    train = root / "train"
    held = root / "held"
    corpusgen.write_corpus(train, 3, start=0)
    corpusgen.write_corpus(held, 2, start=10)
    profile = root / "style.profile"
    assert main(["calibrate", "--corpus", str(train), "--out", str(profile)]) == 0
    out = root / "out"
    assert main(["obfuscate", "--corpus", str(held), "--profile", str(profile),
                 "--out", str(out), "--seed", "2"]) == 0
    return SimpleNamespace(root=root, train=train, held=held,
                           profile=profile, out=out)


def tree_bytes(out_dir) -> dict[str, bytes]:
    return {p.relative_to(out_dir).as_posix(): p.read_bytes()
            for p in sorted(out_dir.rglob("*"))
            if p.is_file()}


def run_obfuscate(world, out_dir, *extra) -> int:
    return main(["obfuscate", "--corpus", str(world.held),
                 "--profile", str(world.profile), "--out", str(out_dir), *extra])


# ---------------------------------------------------------------------------
# calibrate

def test_calibrate_flat_layout(tmp_path, capsys):
    for i in range(3):
        (tmp_path / f"d{i}.txt").write_text(
            corpusgen.make_document("alice", i), encoding="utf-8")
    profile = tmp_path / "p"
    assert main(["calibrate", "--corpus", str(tmp_path), "--out", str(profile)]) == 0
    assert profile.is_file()
    msg = capsys.readouterr().out
    assert "profile written" in msg
    assert "punct_ratio" in msg


def test_calibrate_skips_degenerate_documents(tmp_path, capsys):
    adir = tmp_path / "alice"
    adir.mkdir()
    (adir / "good.txt").write_text(corpusgen.make_document("alice", 0),
                                   encoding="utf-8")
    (adir / "empty.txt").write_text("...", encoding="utf-8")
    assert main(["calibrate", "--corpus", str(tmp_path),
                 "--out", str(tmp_path / "p")]) == 1
    assert "degenerate" in capsys.readouterr().err


def test_calibrate_empty_corpus(tmp_path, capsys):
    assert main(["calibrate", "--corpus", str(tmp_path),
                 "--out", str(tmp_path / "p")]) == 2
    assert "error" in capsys.readouterr().err


def test_calibrate_missing_corpus(tmp_path):
    assert main(["calibrate", "--corpus", str(tmp_path / "nope"),
                 "--out", str(tmp_path / "p")]) == 2


# ---------------------------------------------------------------------------
# obfuscate

def test_output_tree_layout(world):
    doc_dirs = sorted(p.name for p in world.out.iterdir())
    assert len(doc_dirs) == 10  # five authors, two held-out docs each
    assert doc_dirs[0] == "alice__doc10"
    for d in world.out.iterdir():
        assert (d / "obfuscation.txt").is_file()
        assert (d / "audit.jsonl").is_file()
        payload = json.loads((d / "obfuscation.json").read_text(encoding="utf-8"))
        for obj in payload:
            assert set(obj) == {"original", "obfuscation", "original-start-charpos",
                                "original-end-charpos", "obfuscation-id"}


def test_obfuscate_progress_lines(world, tmp_path, capsys):
    assert run_obfuscate(world, tmp_path / "o", "--seed", "2") == 0
    lines = capsys.readouterr().out.splitlines()
    doc_lines = [l for l in lines if l.startswith("alice__doc10")]
    assert doc_lines and "passes=" in doc_lines[0] and "edits=" in doc_lines[0]


def test_obfuscate_reruns_are_byte_identical(world, tmp_path):
    assert run_obfuscate(world, tmp_path / "o", "--seed", "2") == 0
    assert tree_bytes(tmp_path / "o") == tree_bytes(world.out)


def test_config_file_supplies_the_seed(world, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# run settings\nseed=2\n", encoding="utf-8")
    assert run_obfuscate(world, tmp_path / "o", "--config", str(cfg)) == 0
    assert tree_bytes(tmp_path / "o") == tree_bytes(world.out)


def test_flags_beat_the_config_file(world, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed=5\n", encoding="utf-8")
    assert run_obfuscate(world, tmp_path / "o", "--config", str(cfg),
                         "--seed", "2") == 0
    assert tree_bytes(tmp_path / "o") == tree_bytes(world.out)


def test_disable_removes_a_transform(world, tmp_path):
    def kinds_in(out_dir):
        found = set()
        for audit in out_dir.rglob("audit.jsonl"):
            for line in audit.read_text(encoding="utf-8").splitlines():
                found.add(json.loads(line)["kind"])
        return found

    assert "Paraphrase" in kinds_in(world.out)
    assert run_obfuscate(world, tmp_path / "o", "--seed", "2",
                         "--disable", "Paraphrase") == 0
    assert "Paraphrase" not in kinds_in(tmp_path / "o")


def test_obfuscate_requires_a_profile(world, tmp_path, capsys):
    assert main(["obfuscate", "--corpus", str(world.held),
                 "--out", str(tmp_path / "o")]) == 2
    assert "profile" in capsys.readouterr().err


def test_obfuscate_unknown_disable_name(world, tmp_path, capsys):
    assert run_obfuscate(world, tmp_path / "o", "--disable", "NotAThing") == 2
    assert "unknown transform" in capsys.readouterr().err


def test_obfuscate_missing_corpus(world, tmp_path):
    assert main(["obfuscate", "--corpus", str(tmp_path / "nope"),
                 "--profile", str(world.profile),
                 "--out", str(tmp_path / "o")]) == 2


def test_obfuscate_empty_corpus(world, tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert main(["obfuscate", "--corpus", str(empty),
                 "--profile", str(world.profile),
                 "--out", str(tmp_path / "o")]) == 2
    assert "no .txt documents" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# evaluate

def test_evaluate_report(world, capsys):
    assert main(["evaluate", "--corpus", str(world.held),
                 "--obfuscated", str(world.out),
                 "--profile", str(world.profile)]) == 0
    msg = capsys.readouterr().out
    assert "punct_ratio" in msg
    assert "mean_dist_before" in msg


def test_evaluate_tsv_format(world, capsys):
    assert main(["evaluate", "--corpus", str(world.held),
                 "--obfuscated", str(world.out),
                 "--profile", str(world.profile), "--format", "tsv"]) == 0
    first = capsys.readouterr().out.splitlines()[0]
    assert first == "metric\ttarget\tmean_dist_before\tmean_dist_after"


def test_evaluate_requires_a_profile(world, capsys):
    assert main(["evaluate", "--corpus", str(world.held),
                 "--obfuscated", str(world.out)]) == 2
    assert "profile" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# attack

def test_attack_reports_accuracy(world, capsys):
    assert main(["attack", "--train", str(world.train),
                 "--test", str(world.held),
                 "--obfuscated", str(world.out)]) == 0
    msg = capsys.readouterr().out
    assert "accuracy_before" in msg
    assert "accuracy_after" in msg
    assert "drop" in msg


def test_attack_needs_two_authors(world, tmp_path, capsys):
    solo = tmp_path / "solo"
    (solo / "alice").mkdir(parents=True)
    (solo / "alice" / "d.txt").write_text(
        corpusgen.make_document("alice", 0), encoding="utf-8")
    assert main(["attack", "--train", str(solo), "--test", str(world.held),
                 "--obfuscated", str(world.out)]) == 2
    assert "authors" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# general usage

def test_no_arguments_is_a_usage_error():
    assert main([]) == 2


def test_missing_required_flags():
    assert main(["obfuscate"]) == 2


def test_bad_config_lines(world, tmp_path, capsys):
    bad_key = tmp_path / "a.cfg"
    bad_key.write_text("bogus=1\n", encoding="utf-8")
    assert run_obfuscate(world, tmp_path / "o1", "--config", str(bad_key)) == 2
    assert "unknown key" in capsys.readouterr().err

    bad_value = tmp_path / "b.cfg"
    bad_value.write_text("seed=abc\n", encoding="utf-8")
    assert run_obfuscate(world, tmp_path / "o2", "--config", str(bad_value)) == 2

    assert run_obfuscate(world, tmp_path / "o3",
                         "--config", str(tmp_path / "missing.cfg")) == 2
