"""Experiment configuration and the pipelines behind each CLI command.

Every artifact echoes the configuration and its hash. Paths enter the echo only
as file names plus a content digest, so identical inputs in different
directories give byte-identical outputs.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .affect import build_emotion_space, default_lexicon, load_emotion_space, load_polarity_lexicon
from .corpus import CorpusRecord, filter_min_tokens, load_corpus, split_long_documents
from .errors import ConfigError, InsufficientCorpus, TooFewInstances, ZeroVariance
from .features import GROUPS, SCHEMA_VERSION, FeatureSchema, Resources, extract_features
from .learn import EvalReport, LabeledDataset, cross_validate, downsample, zero_r
from .learn.harness import make_folds
from .ner import default_cues, default_gazetteer, load_gazetteer
from .stats import approx_randomization, describe, f_test, macro_f1_metric, render_table, t_test
from .text_core import Document
from .timex import default_grammar, load_timex_grammar

__all__ = [
    "ExperimentConfig",
    "FeatureTable",
    "build_resources",
    "extract_table",
    "prepare_corpus",
    "run_crossval",
    "run_describe",
    "run_significance",
]

log = logging.getLogger(__name__)


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _ref(path: str | None) -> dict | None:
    if path is None:
        return None
    return {"name": Path(path).name, "sha256": file_digest(path)}


@dataclass
class ExperimentConfig:
    corpora: list[str]
    groups: tuple[str, ...] = tuple(GROUPS)
    seed: int = 0
    k: int = 10
    kernel: str = "rbf"
    c: float = 1.0
    gamma: float | None = None
    scaler: str = "fold"
    downsample: str = "auto"
    min_tokens: int = 30
    max_words: int = 1000
    gazetteer: str | None = None
    timex_rules: str | None = None
    lexicon: str | None = None
    emotion_space: str | None = None
    emotion_build_corpus: str | None = None
    emotion_dims: int = 100
    rounds: int = 10_000
    welch: bool = False
    workers: int = 1
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not self.corpora:
            raise ConfigError("corpus", "at least one --corpus is required")
        for name in ("gazetteer", "timex_rules", "lexicon", "emotion_space", "emotion_build_corpus"):
            value = getattr(self, name)
            if value is not None and not Path(value).is_file():
                raise ConfigError(name.replace("_", "-"), f"file not found: {value}")
        for p in self.corpora:
            if not Path(p).is_file():
                raise ConfigError("corpus", f"file not found: {p}")
        if self.emotion_space and self.emotion_build_corpus:
            raise ConfigError("emotion-space", "give either --emotion-space or --emotion-build-corpus, not both")
        if self.k < 2:
            raise ConfigError("k", "k must be at least 2")
        if self.kernel not in ("linear", "rbf"):
            raise ConfigError("kernel", f"unknown kernel {self.kernel!r}")
        if not self.c > 0:
            raise ConfigError("c", "C must be positive")
        if self.gamma is not None and not self.gamma > 0:
            raise ConfigError("gamma", "gamma must be positive")
        if self.scaler not in ("fold", "global"):
            raise ConfigError("scaler", f"unknown scaler mode {self.scaler!r}")
        if self.downsample not in ("auto", "yes", "no"):
            raise ConfigError("downsample", "expected auto, yes or no")
        if self.max_words < 2 * self.min_tokens:
            raise ConfigError("max-words", "must be at least twice --min-tokens")
        if self.rounds < 1:
            raise ConfigError("rounds", "must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers", "must be at least 1")
        if self.emotion_dims < 1:
            raise ConfigError("emotion-dims", "must be at least 1")

    def echo(self) -> dict:
        """Configuration as written into artifacts (no output path, no worker count)."""
        return {
            "corpora": [_ref(p) for p in self.corpora],
            "groups": list(self.groups),
            "seed": self.seed,
            "k": self.k,
            "kernel": self.kernel,
            "C": self.c,
            "gamma": self.gamma,
            "scaler": self.scaler,
            "downsample": self.downsample,
            "min_tokens": self.min_tokens,
            "max_words": self.max_words,
            "gazetteer": _ref(self.gazetteer) or "builtin",
            "timex_rules": _ref(self.timex_rules) or "builtin",
            "lexicon": _ref(self.lexicon) or "builtin",
            "emotion_space": _ref(self.emotion_space) or _emotion_source(self),
            "emotion_dims": self.emotion_dims,
            "rounds": self.rounds,
            "welch": self.welch,
            **self.extra,
        }

    @property
    def hash(self) -> str:
        blob = json.dumps(self.echo(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def header(self, command: str) -> dict:
        return {"command": command, "schema_version": SCHEMA_VERSION,
                "config_hash": self.hash, "config": self.echo()}


def _emotion_source(cfg: ExperimentConfig):
    if cfg.emotion_build_corpus:
        return {"built_from": _ref(cfg.emotion_build_corpus)}
    return "built_from_input_corpora"


def prepare_corpus(cfg: ExperimentConfig) -> tuple[list[CorpusRecord], list[dict]]:
    """Load, split long documents, then drop short ones.

    With several corpus files, records without a label take the file stem.
    """
    records: list[CorpusRecord] = []
    seen: set[str] = set()
    multi = len(cfg.corpora) > 1
    for p in cfg.corpora:
        for r in load_corpus(p, default_label=Path(p).stem if multi else None):
            if r.id in seen:
                raise ConfigError("corpus", f"document id {r.id!r} appears in more than one corpus file")
            seen.add(r.id)
            records.append(r)
    records = split_long_documents(records, cfg.max_words, cfg.min_tokens)
    kept, dropped = filter_min_tokens(records, cfg.min_tokens)
    if not kept:
        raise InsufficientCorpus("no document survives the minimum-length filter")
    return kept, [{"id": d.id, "word_count": d.word_count} for d in dropped]


def build_resources(cfg: ExperimentConfig, records: Sequence[CorpusRecord], need_emotion: bool) -> Resources:
    gaz = load_gazetteer(cfg.gazetteer) if cfg.gazetteer else default_gazetteer()
    grammar = load_timex_grammar(cfg.timex_rules) if cfg.timex_rules else default_grammar()
    lex = load_polarity_lexicon(cfg.lexicon) if cfg.lexicon else default_lexicon()
    space = None
    if need_emotion:
        if cfg.emotion_space:
            space = load_emotion_space(cfg.emotion_space)
        else:
            texts = ([r.text for r in load_corpus(cfg.emotion_build_corpus, default_label="_")]
                     if cfg.emotion_build_corpus else [r.text for r in records])
            space = build_emotion_space(texts, dims=cfg.emotion_dims, seed=cfg.seed)
    return Resources(gaz, grammar, lex, space, default_cues())


@dataclass
class FeatureTable:
    ids: list[str]
    labels: list[str]
    names: tuple[str, ...]
    x: np.ndarray

    def dataset(self) -> LabeledDataset:
        return LabeledDataset(self.x, self.labels, self.ids, self.names)


def extract_table(records: Sequence[CorpusRecord], resources: Resources, groups: Sequence[str],
                  workers: int = 1) -> FeatureTable:
    schema = FeatureSchema(tuple(groups))

    def one(r: CorpusRecord):
        return extract_features(Document(r.id, r.text, r.label, r.source), resources, schema.groups)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            vectors = list(pool.map(one, records))
    else:
        vectors = [one(r) for r in records]
    x = np.array([v.values for v in vectors], dtype=np.float64).reshape(len(vectors), len(schema.names))
    return FeatureTable([r.id for r in records], [r.label for r in records], schema.names, x)


def _label_order(labels: Sequence[str]) -> list[str]:
    order: list[str] = []
    for lab in labels:
        if lab not in order:
            order.append(lab)
    return order


def run_describe(cfg: ExperimentConfig, table: FeatureTable) -> dict:
    summary = describe(table.x, table.labels, table.names, _label_order(table.labels))
    text = "".join(
        f"{group}\n{render_table(summary, [n for n in GROUPS[group] if n in table.names])}\n"
        for group in GROUPS if any(n in table.names for n in GROUPS[group])
    )
    return {"summary": summary, "text": text}


def _should_downsample(cfg: ExperimentConfig, n_classes: int) -> bool:
    return cfg.downsample == "yes" or (cfg.downsample == "auto" and n_classes == 2)


def _feature_sets(groups: Sequence[str]) -> list[tuple[str, tuple[str, ...]]]:
    """Each selected group alone, plus their union when more than one is selected."""
    sets = [(g, (g,)) for g in groups]
    if len(groups) > 1:
        sets.append((FeatureSchema(tuple(groups)).label, tuple(groups)))
    return sets


def crossval_dataset(cfg: ExperimentConfig, table: FeatureTable) -> LabeledDataset:
    ds = table.dataset()
    if len(ds.classes) < 2:
        raise ConfigError("corpus", f"classification needs at least 2 labels, found {list(ds.classes)}")
    if _should_downsample(cfg, len(ds.classes)):
        ds = downsample(ds, cfg.seed)
    return ds


def check_folds(cfg: ExperimentConfig, labels: Sequence[str]) -> None:
    """Fail on ``k`` larger than the smallest class before any feature is computed."""
    counts: dict[str, int] = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    if len(counts) < 2:
        raise ConfigError("corpus", f"classification needs at least 2 labels, found {sorted(counts)}")
    smallest = min(counts.values())
    if cfg.k > smallest:
        label = min((c for c in counts if counts[c] == smallest))
        raise ConfigError("k", f"k={cfg.k} exceeds the {smallest} documents of class {label!r}")


def run_crossval(cfg: ExperimentConfig, table: FeatureTable) -> dict:
    """Cross-validate every feature set plus ZeroR on one shared fold plan."""
    ds = crossval_dataset(cfg, table)
    try:
        make_folds(ds, cfg.k, cfg.seed)
    except TooFewInstances as exc:
        raise ConfigError("k", str(exc)) from None
    runs: dict[str, EvalReport] = {}
    for label, groups in _feature_sets(cfg.groups):
        names = FeatureSchema(groups).names
        runs[label] = cross_validate(ds, cfg.k, names, cfg.kernel, cfg.c, cfg.gamma, cfg.scaler,
                                     cfg.seed, cfg.workers, {"feature_set": label})
    runs["ZeroR"] = zero_r(ds, cfg.k, cfg.seed, {"feature_set": "ZeroR"})
    return {"dataset": ds, "runs": runs}


def crossval_rows(runs: dict[str, EvalReport]) -> list[list]:
    rows = [["features", "precision", "recall", "f1", "mcc", "accuracy",
             "weighted_precision", "weighted_recall", "weighted_f1"]]
    for name, rep in runs.items():
        m = rep.metrics
        rows.append([name, m.macro_precision, m.macro_recall, m.macro_f1, rep.mcc, m.accuracy,
                     m.weighted_precision, m.weighted_recall, m.weighted_f1])
    return rows


def crossval_text(runs: dict[str, EvalReport]) -> str:
    rows = crossval_rows(runs)
    out = [f"{'Features':<16}{'Prec':>8}{'Rec':>8}{'F1':>8}{'MCC':>8}   (macro; weighted P/R/F1)"]
    for r in rows[1:]:
        out.append(f"{r[0]:<16}{r[1]:>8.3f}{r[2]:>8.3f}{r[3]:>8.3f}{r[4]:>8.3f}"
                   f"   {r[6]:.3f} {r[7]:.3f} {r[8]:.3f}")
    classes = next(iter(runs.values())).classes
    out.append("")
    out.append(f"{'Features':<16}" + "".join(f"{c + ' P':>9}{c + ' R':>9}{c + ' F1':>9}" for c in classes))
    for name, rep in runs.items():
        per = rep.metrics.per_class
        out.append(f"{name:<16}" + "".join(
            f"{per[c].precision:>9.3f}{per[c].recall:>9.3f}{per[c].f1:>9.3f}" for c in classes))
    return "\n".join(out) + "\n"


def predictions_csv(runs: dict[str, EvalReport]) -> str:
    names = list(runs)
    first = runs[names[0]]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["doc_id", "gold", *names])
    for i, (doc_id, gold, _) in enumerate(first.predictions):
        w.writerow([doc_id, gold, *(runs[n].predictions[i][2] for n in names)])
    return buf.getvalue()


def _outcome_pairs(rep: EvalReport, classes: Sequence[str]) -> np.ndarray:
    index = {c: i for i, c in enumerate(classes)}
    return np.array([[index[g], index[p]] for _, g, p in rep.predictions], dtype=np.int64)


def run_significance(cfg: ExperimentConfig, table: FeatureTable) -> dict:
    """Per-dimension t and F tests between every label pair, and paired
    randomization tests on macro F1 between every pair of cross-validated systems."""
    labels = _label_order(table.labels)
    lab = np.asarray(table.labels)
    feature_tests = []
    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            xa, xb = table.x[lab == a], table.x[lab == b]
            for j, name in enumerate(table.names):
                t = t_test(xa[:, j], xb[:, j], equal_var=not cfg.welch)
                try:
                    f = f_test(xa[:, j], xb[:, j])
                    f_row = {"F": f.f, "F_df": list(f.df), "F_p": f.p}
                except ZeroVariance as exc:
                    f_row = {"F": None, "F_df": None, "F_p": None, "F_note": str(exc)}
                feature_tests.append({"a": a, "b": b, "dimension": name, "t": t.t, "t_df": t.df,
                                      "t_p": t.p, **f_row})
    cv = run_crossval(cfg, table)
    runs = cv["runs"]
    classes = cv["dataset"].classes
    metric = macro_f1_metric(classes)
    system_tests = []
    names = list(runs)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            p = approx_randomization(_outcome_pairs(runs[a], classes), _outcome_pairs(runs[b], classes),
                                     metric, cfg.rounds, cfg.seed)
            system_tests.append({"a": a, "b": b, "f1_a": runs[a].metrics.macro_f1,
                                 "f1_b": runs[b].metrics.macro_f1, "p": p})
    return {"feature_tests": feature_tests, "system_tests": system_tests, "runs": runs}
