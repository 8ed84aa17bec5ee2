"""Feature schema, coverage, per-document extraction and z-score scaling."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .affect import (
    EmotionLoad,
    EmotionSpace,
    PolarityLexicon,
    default_lexicon,
    document_sentiment,
    emotion_load,
)
from .errors import DegenerateProfile, InsufficientRows, NonFiniteFeature, OutOfVocabularyDocument
from .ner import ENTITY_TAGS, Cues, Gazetteer, default_cues, default_gazetteer, recognize_entities
from .readability import compute_readability
from .text_core import AnnotationSpan, Document, TextProfile
from .timex import TIMEX_TAGS, TimexGrammar, default_grammar

__all__ = [
    "GROUPS",
    "GROUP_NAMES",
    "SCHEMA_VERSION",
    "FeatureSchema",
    "FeatureVector",
    "Resources",
    "Scaler",
    "apply_scaler",
    "coverage",
    "extract_features",
    "fit_scaler",
    "parse_groups",
    "read_feature_csv",
    "write_feature_csv",
]

SCHEMA_VERSION = "1"

GROUPS: dict[str, tuple[str, ...]] = {
    "NE": ("PER", "LOC", "ORG", "MISC", "NE_ALL"),
    "TIMEX": ("DATE", "DURATION", "TIME", "TIMEX_ALL"),
    "AFF": ("POS_sent", "NEG_sent", "ALL_sent", "POS_emo", "NEG_emo", "ALL_emo"),
    "READ": ("Fog", "Flesch", "Kincaid", "CpxRatio", "SyllRatio", "WordsPerSent"),
}
GROUP_NAMES = tuple(GROUPS)
COVERAGE_DIMS = GROUPS["NE"] + GROUPS["TIMEX"]


def parse_groups(spec: str | Iterable[str]) -> tuple[str, ...]:
    """Normalize a group selection such as ``"ne,read"`` or ``["all"]`` to canonical order."""
    items = spec.split(",") if isinstance(spec, str) else list(spec)
    chosen = set()
    for item in (i.strip().upper() for i in items):
        if not item:
            continue
        if item == "ALL":
            chosen.update(GROUP_NAMES)
        elif item in GROUPS:
            chosen.add(item)
        else:
            raise ValueError(f"unknown feature group {item!r}; expected one of ne, timex, aff, read, all")
    if not chosen:
        raise ValueError("no feature group selected")
    return tuple(g for g in GROUP_NAMES if g in chosen)


@dataclass(frozen=True)
class FeatureSchema:
    groups: tuple[str, ...] = GROUP_NAMES

    def __post_init__(self):
        object.__setattr__(self, "groups", parse_groups(self.groups))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for g in self.groups for n in GROUPS[g])

    def __len__(self) -> int:
        return len(self.names)

    @property
    def label(self) -> str:
        return "ALL" if self.groups == GROUP_NAMES else "+".join(self.groups)

    def columns(self, names: Sequence[str]) -> list[int]:
        """Positions of this schema's dimensions inside a wider ``names`` layout."""
        return [list(names).index(n) for n in self.names]


@dataclass(frozen=True)
class FeatureVector:
    doc_id: str
    names: tuple[str, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.names) != len(self.values):
            raise ValueError("names and values differ in length")
        bad = [n for n, v in zip(self.names, self.values) if not math.isfinite(v)]
        if bad:
            raise NonFiniteFeature(f"document {self.doc_id!r}: non-finite {', '.join(bad)}")

    def __getitem__(self, name: str) -> float:
        return self.values[self.names.index(name)]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))


@dataclass(frozen=True)
class Resources:
    gazetteer: Gazetteer
    grammar: TimexGrammar
    lexicon: PolarityLexicon
    emotion_space: EmotionSpace | None = None
    cues: Cues | None = None

    @classmethod
    def default(cls, emotion_space: EmotionSpace | None = None) -> "Resources":
        return cls(default_gazetteer(), default_grammar(), default_lexicon(), emotion_space, default_cues())


def coverage(spans: Iterable[AnnotationSpan], profile: TextProfile, tags: Iterable[str] | None = None) -> float:
    """Spans per word; a multi-token span counts once.

    ``tags`` restricts the count to spans with those tags.
    """
    if profile.words <= 0:
        raise DegenerateProfile("coverage needs at least one word")
    keep = None if tags is None else set(tags)
    n = sum(1 for s in spans if keep is None or s.tag in keep)
    return n / profile.words


def _coverage_dims(spans: list[AnnotationSpan], profile: TextProfile, tags: Sequence[str]) -> list[float]:
    per_tag = [coverage(spans, profile, [t]) for t in tags]
    return per_tag + [coverage(spans, profile, tags)]


def extract_features(doc: Document, resources: Resources, groups: Iterable[str] = GROUP_NAMES) -> FeatureVector:
    """Feature row for ``doc`` restricted to the selected groups, in schema order.

    A document with no in-vocabulary word for the emotion space gets the neutral
    load 0.5 for every emotion.
    """
    schema = FeatureSchema(tuple(groups))
    profile = doc.profile
    values: list[float] = []
    for group in schema.groups:
        if group == "NE":
            spans = recognize_entities(doc, resources.gazetteer, resources.cues)
            values += _coverage_dims(spans, profile, ENTITY_TAGS)
        elif group == "TIMEX":
            spans = resources.grammar.recognize(doc.tokens)
            values += _coverage_dims(spans, profile, TIMEX_TAGS)
        elif group == "AFF":
            if resources.emotion_space is None:
                raise ValueError("AFF features need an emotion space")
            sent = document_sentiment(doc, resources.lexicon)
            try:
                emo = emotion_load(doc, resources.emotion_space)
            except OutOfVocabularyDocument:
                emo = EmotionLoad.neutral()
            values += [sent.pos, sent.neg, sent.all, emo.pos, emo.neg, emo.all]
        elif group == "READ":
            r = compute_readability(profile)
            values += [r.fog, r.flesch, r.kincaid, r.cpx_ratio, r.syll_ratio, r.words_per_sentence]
    return FeatureVector(doc.id, schema.names, tuple(values))


@dataclass(frozen=True, eq=False)
class Scaler:
    mean: np.ndarray
    std: np.ndarray

    def transform(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        safe = np.where(self.std > 0, self.std, 1.0)
        return np.where(self.std > 0, (x - self.mean) / safe, 0.0)

    def inverse(self, z: np.ndarray) -> np.ndarray:
        """Undo :meth:`transform`; dimensions with zero spread come back as their mean."""
        return np.asarray(z, dtype=np.float64) * self.std + self.mean


def fit_scaler(matrix) -> Scaler:
    """Per-column mean and population standard deviation (divide by n)."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 2:
        raise InsufficientRows(f"need at least 2 rows to fit a scaler, got shape {m.shape}")
    return Scaler(m.mean(axis=0), m.std(axis=0))


def apply_scaler(scaler: Scaler, x) -> np.ndarray:
    return scaler.transform(x)


def write_feature_csv(
    path: str | Path,
    ids: Sequence[str],
    labels: Sequence[str],
    names: Sequence[str],
    matrix,
    comment: str | None = None,
) -> None:
    """Header ``doc_id,label,<dims>``; floats written with ``repr`` so they round-trip.

    ``comment`` becomes a leading ``#`` line.
    """
    m = np.asarray(matrix, dtype=np.float64)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["doc_id", "label", *names])
        for i, (doc_id, label) in enumerate(zip(ids, labels)):
            w.writerow([doc_id, label, *(repr(float(v)) for v in m[i])])


def read_feature_csv(path: str | Path) -> tuple[list[str], list[str], tuple[str, ...], np.ndarray]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(rows)
        if header[:2] != ["doc_id", "label"]:
            raise ValueError(f"{path}: first columns must be doc_id,label")
        ids, labels, values = [], [], []
        for row in rows:
            ids.append(row[0])
            labels.append(row[1])
            values.append([float(v) for v in row[2:]])
    names = tuple(header[2:])
    return ids, labels, names, np.asarray(values, dtype=np.float64).reshape(len(ids), len(names))
