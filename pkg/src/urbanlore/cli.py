"""Command-line entry point: ``urbanlore <command> [flags]``.

Exit status 0 on success, 1 for configuration errors, 2 for data errors and 3
for internal invariant failures.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from .affect import save_emotion_space
from .corpus import dump_corpus
from .errors import ConfigError, DataError, InvariantError
from .experiment import (
    ExperimentConfig,
    build_resources,
    check_folds,
    crossval_rows,
    crossval_text,
    extract_table,
    predictions_csv,
    prepare_corpus,
    run_crossval,
    run_describe,
    run_significance,
)
from .features import SCHEMA_VERSION, parse_groups, write_feature_csv
from .stats import generate_synthetic_corpus, three_genre_spec

log = logging.getLogger("urbanlore")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_INVARIANT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError("arguments", message)


def _common(p: argparse.ArgumentParser, corpus: bool = True) -> None:
    p.add_argument("--seed", type=int, required=True, help="random seed (required)")
    p.add_argument("--out", required=True, help="output directory")
    if corpus:
        p.add_argument("--corpus", action="append", default=[], required=True,
                       help="JSONL corpus; repeat for one file per class")
        p.add_argument("--groups", default="all", help="comma list of ne,timex,aff,read or all")
        p.add_argument("--min-tokens", type=int, default=30)
        p.add_argument("--max-words", type=int, default=1000)
        p.add_argument("--gazetteer")
        p.add_argument("--timex-rules")
        p.add_argument("--lexicon")
        emo = p.add_mutually_exclusive_group()
        emo.add_argument("--emotion-space", help="saved emotion space file")
        emo.add_argument("--emotion-build-corpus", help="JSONL corpus to build the emotion space from")
        p.add_argument("--emotion-dims", type=int, default=100)
        p.add_argument("--workers", type=int, default=1)


def _learning(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--kernel", choices=("linear", "rbf"), default="rbf")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=None, help="rbf gamma (default 1/num_features)")
    p.add_argument("--scaler", choices=("fold", "global"), default="fold")
    p.add_argument("--downsample", choices=("auto", "yes", "no"), default="auto",
                   help="balance classes by downsampling; auto means only for two classes")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="urbanlore", description="Genre feature extraction and classification experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", help="write the per-document feature CSV")
    _common(p)
    p = sub.add_parser("describe", help="per-label mean and sigma tables")
    _common(p)
    p = sub.add_parser("crossval", help="k-fold SVM evaluation per feature group plus ZeroR")
    _common(p)
    _learning(p)
    p = sub.add_parser("significance", help="t/F tests per dimension and randomization tests between systems")
    _common(p)
    _learning(p)
    p.add_argument("--rounds", type=int, default=10_000)
    p.add_argument("--welch", action="store_true", help="Welch's t-test instead of pooled variance")
    p = sub.add_parser("synth", help="write a synthetic three-genre corpus")
    _common(p, corpus=False)
    p.add_argument("--count", type=int, default=120, help="documents per genre")
    p.add_argument("--dispersion", type=float, default=0.35)
    p = sub.add_parser("report", help="merge earlier run directories into one document")
    p.add_argument("--out", required=True)
    p.add_argument("runs", nargs="+", help="output directories of earlier commands")
    return parser


def _config(args) -> ExperimentConfig:
    try:
        groups = parse_groups(args.groups)
    except ValueError as exc:
        raise ConfigError("groups", str(exc)) from None
    cfg = ExperimentConfig(
        corpora=list(args.corpus),
        groups=groups,
        seed=args.seed,
        k=getattr(args, "k", 10),
        kernel=getattr(args, "kernel", "rbf"),
        c=getattr(args, "c", 1.0),
        gamma=getattr(args, "gamma", None),
        scaler=getattr(args, "scaler", "fold"),
        downsample=getattr(args, "downsample", "auto"),
        min_tokens=args.min_tokens,
        max_words=args.max_words,
        gazetteer=args.gazetteer,
        timex_rules=args.timex_rules,
        lexicon=args.lexicon,
        emotion_space=args.emotion_space,
        emotion_build_corpus=args.emotion_build_corpus,
        emotion_dims=args.emotion_dims,
        rounds=getattr(args, "rounds", 10_000),
        welch=getattr(args, "welch", False),
        workers=args.workers,
    )
    cfg.validate()
    return cfg


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="\n")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _stamp(cfg: ExperimentConfig) -> str:
    return f"schema_version={SCHEMA_VERSION} config_hash={cfg.hash}"


def _csv_text(rows: Sequence[Sequence], comment: str) -> str:
    buf = io.StringIO()
    buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _prepare(cfg: ExperimentConfig, out: Path, command: str, need_classes: bool = False):
    records, dropped = prepare_corpus(cfg)
    if need_classes:
        check_folds(cfg, [r.label for r in records])
    resources = build_resources(cfg, records, need_emotion="AFF" in cfg.groups)
    table = extract_table(records, resources, cfg.groups, cfg.workers)
    _write(out / "dropped.json", _json({**cfg.header(command), "dropped": dropped}))
    return records, resources, table


def cmd_extract(args) -> None:
    cfg = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _, resources, table = _prepare(cfg, out, "extract")
    write_feature_csv(out / "features.csv", table.ids, table.labels, table.names, table.x, _stamp(cfg))
    _write(out / "features.meta.json", _json({**cfg.header("extract"), "names": list(table.names),
                                              "documents": len(table.ids)}))
    if resources.emotion_space is not None and not cfg.emotion_space:
        save_emotion_space(resources.emotion_space, out / "emotion_space.bin")


def cmd_describe(args) -> None:
    cfg = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _, _, table = _prepare(cfg, out, "describe")
    result = run_describe(cfg, table)
    summary = result["summary"]
    _write(out / "describe.txt", f"# {_stamp(cfg)}\n{result['text']}")
    _write(out / "describe.csv", f"# {_stamp(cfg)}\n{summary.to_csv()}")
    _write(out / "describe.json", _json({**cfg.header("describe"), **summary.to_dict()}))


def cmd_crossval(args) -> None:
    cfg = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _, _, table = _prepare(cfg, out, "crossval", need_classes=True)
    runs = run_crossval(cfg, table)["runs"]
    _write(out / "crossval.json", _json({**cfg.header("crossval"),
                                         "runs": {k: v.to_dict() for k, v in runs.items()}}))
    _write(out / "crossval.csv", _csv_text(crossval_rows(runs), _stamp(cfg)))
    _write(out / "crossval.txt", f"# {_stamp(cfg)}\n{crossval_text(runs)}")
    _write(out / "predictions.csv", f"# {_stamp(cfg)}\n{predictions_csv(runs)}")


def cmd_significance(args) -> None:
    cfg = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _, _, table = _prepare(cfg, out, "significance", need_classes=True)
    result = run_significance(cfg, table)
    _write(out / "significance.json", _json({**cfg.header("significance"),
                                             "feature_tests": result["feature_tests"],
                                             "system_tests": result["system_tests"]}))
    rows = [["a", "b", "dimension", "t", "t_df", "t_p", "F", "F_p"]]
    rows += [[r["a"], r["b"], r["dimension"], r["t"], r["t_df"], r["t_p"], r["F"], r["F_p"]]
             for r in result["feature_tests"]]
    _write(out / "feature_tests.csv", _csv_text(rows, _stamp(cfg)))
    rows = [["a", "b", "f1_a", "f1_b", "p"]]
    rows += [[r["a"], r["b"], r["f1_a"], r["f1_b"], r["p"]] for r in result["system_tests"]]
    _write(out / "system_tests.csv", _csv_text(rows, _stamp(cfg)))


def cmd_synth(args) -> None:
    if args.count < 1:
        raise ConfigError("count", "must be at least 1")
    if args.dispersion < 0:
        raise ConfigError("dispersion", "must be non-negative")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    spec = three_genre_spec(args.count, dispersion=args.dispersion)
    records = generate_synthetic_corpus(spec, args.seed)
    dump_corpus(records, out / "corpus.jsonl")
    config = {"preset": "three_genre", "count": args.count, "dispersion": args.dispersion, "seed": args.seed}
    _write(out / "synth.json", _json({"command": "synth", "schema_version": SCHEMA_VERSION,
                                      "config": config, "documents": len(records)}))


_REPORT_ORDER = ("synth.json", "describe.txt", "crossval.txt", "system_tests.csv", "features.meta.json")


def cmd_report(args) -> None:
    sections = []
    for run in args.runs:
        d = Path(run)
        if not d.is_dir():
            raise ConfigError("runs", f"not a directory: {run}")
        found = [d / name for name in _REPORT_ORDER if (d / name).is_file()]
        if not found:
            raise ConfigError("runs", f"no known artifacts in {run}")
        for path in found:
            text = path.read_text(encoding="utf-8")
            if path.suffix == ".json":
                meta = json.loads(text)
                text = _json({k: meta[k] for k in sorted(meta) if k not in ("names",)})
            sections.append(f"## {d.name}/{path.name}\n\n```\n{text.rstrip()}\n```\n")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    head = f"# Experiment report\n\nschema_version={SCHEMA_VERSION}\n\n"
    _write(out / "report.md", head + "\n".join(sections))


COMMANDS = {
    "extract": cmd_extract,
    "describe": cmd_describe,
    "crossval": cmd_crossval,
    "significance": cmd_significance,
    "synth": cmd_synth,
    "report": cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvariantError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
