"""Command line front end.

Commands: calibrate (build a target profile from a corpus), obfuscate
(rewrite documents toward a profile), evaluate (metric movement report),
attack (attribution accuracy before vs after).

Exit codes: 0 everything succeeded, 1 some documents were skipped,
2 usage error or nothing succeeded.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .evaluation import (
    EmptyTextError,
    InsufficientAuthorsError,
    corpus_report,
    load_author_corpus,
    safety_drop,
    train_attributor,
)
from .lexicons import (
    LexiconBundle,
    MalformedLexiconError,
    MissingLexiconError,
    default_bundle,
    load_bundle,
)
from .metrics import (
    CONTROLLED_METRICS,
    DegenerateScopeError,
    EmptyCorpusError,
    calibrate,
    compute_metrics,
    load_profile,
    save_profile,
)
from .pipeline import ObfuscationConfig, obfuscate_text, write_result
from .textmodel import parse_text
from .transforms import TransformKind

__all__ = ["main"]

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# config file: flat key=value lines, '#' comments; flags override the file

_CONFIG_KEYS = {
    "seed": int,
    "epsilon": float,
    "length_epsilon": float,
    "passes": int,
    "jobs": int,
    "paraphrase_probability": float,
    "noise_probability": float,
    "oov_target": float,
    "format": str,
    "lexicons": str,
    "profile": str,
    "disable": str,        # comma separated transform names
}


def read_config(path: str) -> dict:
    values = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_KEYS[key](value.strip())
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def _pick(flag, config: dict, key: str, fallback):
    """Flag if given, else config file entry, else the built-in default."""
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return fallback


def _parse_disabled(names) -> frozenset:
    valid = {k.value: k for k in TransformKind}
    kinds = set()
    for name in names:
        if name not in valid:
            raise UsageError(
                f"unknown transform {name!r}; choose from: "
                + ", ".join(sorted(valid)))
        kinds.add(valid[name])
    return frozenset(kinds)


def _load_lexicons(path) -> LexiconBundle:
    if path is None:
        return default_bundle()
    return load_bundle(path)


def _iter_documents(corpus_dir: Path):
    """Yield (doc_id, path) for every .txt file, nested dirs flattened.

    Ids come from relative paths with separators turned into '__' so each
    document gets its own flat output directory.
    """
    for path in sorted(corpus_dir.rglob("*.txt")):
        rel = path.relative_to(corpus_dir)
        doc_id = "__".join(rel.parts)[:-len(".txt")]
        yield doc_id, path


# ---------------------------------------------------------------------------
# commands

def cmd_calibrate(args, config) -> int:
    lexicons = _load_lexicons(_pick(args.lexicons, config, "lexicons", None))
    corpus_dir = Path(args.corpus)
    if not corpus_dir.is_dir():
        raise UsageError(f"corpus directory not found: {corpus_dir}")
    subdirs = sorted(p for p in corpus_dir.iterdir() if p.is_dir())
    collections: dict[str, list] = {}
    skipped = 0
    if subdirs:
        groups = [(d.name, sorted(d.glob("*.txt"))) for d in subdirs]
    else:
        groups = [(p.stem, [p]) for p in sorted(corpus_dir.glob("*.txt"))]
    for name, paths in groups:
        docs = []
        for path in paths:
            text = path.read_text(encoding="utf-8")
            doc = parse_text(path.stem, text, lexicons)
            try:
                compute_metrics(doc)
            except DegenerateScopeError:
                skipped += 1
                print(f"warning: skipping degenerate document {path}",
                      file=sys.stderr)
                continue
            docs.append(doc)
        if docs:
            collections[name] = docs
    try:
        profile = calibrate(collections)
    except EmptyCorpusError as exc:
        raise UsageError(str(exc)) from exc
    save_profile(profile, args.out)
    print(f"profile written to {args.out} "
          f"({len(profile.source_ids)} collections, "
          f"{profile.total_word_tokens} word tokens)")
    for name in CONTROLLED_METRICS:
        print(f"  {name}\t{profile.target(name):.6f}")
    return EXIT_PARTIAL if skipped else EXIT_OK


def _obfuscate_one(task):
    """Worker: returns (doc_id, edits, passes, notes) or (doc_id, error)."""
    doc_id, path, profile_path, lexicon_dir, out_dir, cfg = task
    try:
        lexicons = _load_lexicons(lexicon_dir)
        profile = load_profile(profile_path)
        text = Path(path).read_text(encoding="utf-8")
        result = obfuscate_text(doc_id, text, profile, lexicons, cfg)
        write_result(result, out_dir)
        return (doc_id, len(result.audit), result.passes_run,
                tuple(result.notes), None)
    except (DegenerateScopeError, UnicodeDecodeError, OSError) as exc:
        return (doc_id, 0, 0, (), f"{type(exc).__name__}: {exc}")


def cmd_obfuscate(args, config) -> int:
    profile_path = _pick(args.profile, config, "profile", None)
    if profile_path is None:
        raise UsageError("a profile is required (--profile or config)")
    lexicon_dir = _pick(args.lexicons, config, "lexicons", None)
    cfg = ObfuscationConfig(
        seed=_pick(args.seed, config, "seed", 0),
        epsilon=_pick(args.epsilon, config, "epsilon", 0.02),
        length_epsilon=_pick(args.length_epsilon, config, "length_epsilon", 2.0),
        max_passes=_pick(args.passes, config, "passes", 3),
        paraphrase_probability=_pick(None, config, "paraphrase_probability", 0.5),
        noise_probability=_pick(None, config, "noise_probability", 0.15),
        oov_target=_pick(None, config, "oov_target", 0.02),
        disabled=_parse_disabled(
            args.disable if args.disable
            else [s for s in config.get("disable", "").split(",") if s]),
    )
    # fail early on bad inputs so workers never see them
    load_profile(profile_path)
    _load_lexicons(lexicon_dir)
    corpus_dir = Path(args.corpus)
    if not corpus_dir.is_dir():
        raise UsageError(f"corpus directory not found: {corpus_dir}")
    tasks = [(doc_id, str(path), str(profile_path), lexicon_dir,
              str(args.out), cfg)
             for doc_id, path in _iter_documents(corpus_dir)]
    if not tasks:
        raise UsageError(f"no .txt documents under {corpus_dir}")

    jobs = _pick(args.jobs, config, "jobs", 1)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_obfuscate_one, tasks))
    else:
        outcomes = [_obfuscate_one(t) for t in tasks]

    failures = 0
    for doc_id, edits, passes, notes, error in sorted(outcomes):
        if error is not None:
            failures += 1
            print(f"warning: skipped {doc_id}: {error}", file=sys.stderr)
            continue
        print(f"{doc_id}\tpasses={passes}\tedits={edits}")
        for note in notes:
            print(f"  note: {note}")
    if failures == len(outcomes):
        print("error: no documents could be processed", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_PARTIAL if failures else EXIT_OK


def _read_pairs(corpus_dir: Path, obfuscated_dir: Path):
    """Match originals to rewritten texts; returns (pairs, skipped)."""
    pairs = []
    skipped = 0
    for doc_id, path in _iter_documents(corpus_dir):
        out_txt = obfuscated_dir / doc_id / "obfuscation.txt"
        if not out_txt.is_file():
            skipped += 1
            print(f"warning: no obfuscation for {doc_id}", file=sys.stderr)
            continue
        pairs.append((doc_id, path.read_text(encoding="utf-8"),
                      out_txt.read_text(encoding="utf-8")))
    return pairs, skipped


def cmd_evaluate(args, config) -> int:
    lexicons = _load_lexicons(_pick(args.lexicons, config, "lexicons", None))
    profile_path = _pick(args.profile, config, "profile", None)
    if profile_path is None:
        raise UsageError("a profile is required (--profile or config)")
    profile = load_profile(profile_path)
    corpus_dir = Path(args.corpus)
    if not corpus_dir.is_dir():
        raise UsageError(f"corpus directory not found: {corpus_dir}")
    pairs, skipped = _read_pairs(corpus_dir, Path(args.obfuscated))
    befores, afters = [], []
    for doc_id, before_text, after_text in pairs:
        try:
            befores.append(compute_metrics(parse_text(doc_id, before_text, lexicons)))
            afters.append(compute_metrics(
                parse_text(doc_id + "#after", after_text, lexicons)))
        except DegenerateScopeError:
            skipped += 1
            print(f"warning: degenerate document {doc_id}", file=sys.stderr)
    if not befores:
        print("error: nothing to evaluate", file=sys.stderr)
        return EXIT_USAGE
    fmt = _pick(args.format, config, "format", "table")
    print(corpus_report(befores, afters, profile, fmt))
    return EXIT_PARTIAL if skipped else EXIT_OK


def cmd_attack(args, config) -> int:
    train_dir = Path(args.train)
    test_dir = Path(args.test)
    for d in (train_dir, test_dir):
        if not d.is_dir():
            raise UsageError(f"directory not found: {d}")
    train = load_author_corpus(train_dir)
    try:
        attributor = train_attributor(
            {a: [t for _, t in docs] for a, docs in train.items()})
    except (InsufficientAuthorsError, EmptyTextError) as exc:
        raise UsageError(str(exc)) from exc

    originals, obfuscated = [], []
    skipped = 0
    obf_dir = Path(args.obfuscated)
    for author, docs in sorted(load_author_corpus(test_dir).items()):
        for doc_id, text in docs:
            out_txt = obf_dir / f"{author}__{doc_id}" / "obfuscation.txt"
            if not out_txt.is_file():
                skipped += 1
                print(f"warning: no obfuscation for {author}/{doc_id}",
                      file=sys.stderr)
                continue
            originals.append((author, text))
            obfuscated.append((author, out_txt.read_text(encoding="utf-8")))
    if not originals:
        print("error: no test documents with obfuscations", file=sys.stderr)
        return EXIT_USAGE
    report = safety_drop(attributor, originals, obfuscated)
    print(f"documents\t{len(originals)}")
    print(f"accuracy_before\t{report.accuracy_before:.4f}")
    print(f"accuracy_after\t{report.accuracy_after:.4f}")
    print(f"drop\t{report.drop:.4f}")
    return EXIT_PARTIAL if skipped else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mediocria",
        description="Rule-based author obfuscation toward corpus-average style.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--lexicons", metavar="DIR",
                       help="lexicon directory (default: bundled resources)")
        p.add_argument("--config", metavar="FILE",
                       help="key=value config file; flags win on conflict")

    p = sub.add_parser("calibrate", help="build a style profile from a corpus")
    p.add_argument("--corpus", required=True, metavar="DIR")
    p.add_argument("--out", required=True, metavar="FILE")
    common(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("obfuscate", help="rewrite documents toward a profile")
    p.add_argument("--corpus", required=True, metavar="DIR")
    p.add_argument("--profile", metavar="FILE")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--seed", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--length-epsilon", type=float, dest="length_epsilon")
    p.add_argument("--passes", type=int)
    p.add_argument("--disable", action="append", metavar="TRANSFORM",
                   help="transform kind to skip; repeatable")
    p.add_argument("--jobs", type=int)
    common(p)
    p.set_defaults(func=cmd_obfuscate)

    p = sub.add_parser("evaluate", help="metric movement report")
    p.add_argument("--corpus", required=True, metavar="DIR")
    p.add_argument("--obfuscated", required=True, metavar="DIR")
    p.add_argument("--profile", metavar="FILE")
    p.add_argument("--format", choices=("table", "tsv"))
    common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("attack", help="attribution accuracy before vs after")
    p.add_argument("--train", required=True, metavar="DIR")
    p.add_argument("--test", required=True, metavar="DIR")
    p.add_argument("--obfuscated", required=True, metavar="DIR")
    common(p)
    p.set_defaults(func=cmd_attack)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage already; keep that contract
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        config = read_config(args.config) if args.config else {}
        return args.func(args, config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MissingLexiconError, MalformedLexiconError, ValueError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
