"""Datasets, downsampling, stratified folds, cross-validation and the ZeroR baseline."""
from __future__ import annotations

import csv
import io
import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import SingleClassDataset, TooFewInstances
from ..features import FeatureVector, apply_scaler, fit_scaler
from .metrics import ConfusionMatrix, evaluate, mcc_multiclass
from .svm import predict_many, train_svm

__all__ = [
    "EvalReport",
    "FoldPlan",
    "LabeledDataset",
    "cross_validate",
    "downsample",
    "make_folds",
    "zero_r",
]

SCALER_MODES = ("fold", "global")


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    x: np.ndarray
    labels: tuple[str, ...]
    ids: tuple[str, ...]
    names: tuple[str, ...]

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        if x.ndim != 2:
            raise ValueError("x must be 2-dimensional")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "names", tuple(self.names))
        if not (len(self.labels) == len(self.ids) == x.shape[0]):
            raise ValueError("rows, labels and ids differ in length")
        if len(self.names) != x.shape[1]:
            raise ValueError("names do not match the column count")

    @classmethod
    def from_vectors(cls, vectors: Sequence[FeatureVector], labels: Sequence[str]) -> "LabeledDataset":
        if len(vectors) != len(labels):
            raise ValueError("vectors and labels differ in length")
        names = vectors[0].names if vectors else ()
        return cls(np.array([v.values for v in vectors], dtype=np.float64).reshape(len(vectors), len(names)),
                   tuple(labels), tuple(v.doc_id for v in vectors), names)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.labels)))

    def counts(self) -> dict[str, int]:
        return dict(sorted(Counter(self.labels).items()))

    def subset(self, index) -> "LabeledDataset":
        index = np.asarray(index, dtype=np.int64)
        return LabeledDataset(self.x[index], tuple(self.labels[i] for i in index),
                              tuple(self.ids[i] for i in index), self.names)

    def select(self, names: Sequence[str]) -> "LabeledDataset":
        cols = [self.names.index(n) for n in names]
        return LabeledDataset(self.x[:, cols], self.labels, self.ids, tuple(names))


def _class_index(ds: LabeledDataset) -> dict[str, np.ndarray]:
    lab = np.asarray(ds.labels)
    return {c: np.flatnonzero(lab == c) for c in ds.classes}


def downsample(ds: LabeledDataset, seed: int) -> LabeledDataset:
    """Reduce every class to the minority count, then shuffle rows."""
    groups = _class_index(ds)
    if len(groups) < 2:
        raise SingleClassDataset(f"downsampling needs at least 2 classes, got {list(groups)}")
    rng = np.random.default_rng(seed)
    m = min(len(v) for v in groups.values())
    keep = np.concatenate([np.sort(rng.choice(v, m, replace=False)) for v in groups.values()])
    return ds.subset(rng.permutation(keep))


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignment: tuple[int, ...]  # fold index per row

    def test_index(self, fold: int) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.assignment) == fold)

    def train_index(self, fold: int) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.assignment) != fold)

    def sizes(self) -> list[int]:
        return np.bincount(np.asarray(self.assignment, dtype=np.int64), minlength=self.k).tolist()


def make_folds(ds: LabeledDataset, k: int, seed: int) -> FoldPlan:
    """Stratified plan: each class is shuffled and dealt round-robin.

    The dealing position carries over from one class to the next so overall fold
    sizes stay within one of each other as well.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = np.random.default_rng(seed)
    assignment = np.empty(len(ds), dtype=np.int64)
    offset = 0
    for cls, idx in _class_index(ds).items():
        if len(idx) < k:
            raise TooFewInstances(cls, len(idx), k)
        perm = rng.permutation(idx)
        assignment[perm] = (offset + np.arange(len(perm))) % k
        offset += len(perm)
    return FoldPlan(k, tuple(int(a) for a in assignment))


@dataclass
class EvalReport:
    config: dict
    classes: tuple[str, ...]
    confusion: ConfusionMatrix
    folds: list[dict] = field(default_factory=list)
    predictions: list[tuple[str, str, str]] = field(default_factory=list)  # id, gold, predicted

    @property
    def metrics(self):
        return evaluate(self.confusion)

    @property
    def mcc(self) -> float:
        return mcc_multiclass(self.confusion)

    def to_dict(self) -> dict:
        ev = self.metrics
        return {
            "config": self.config,
            "classes": list(self.classes),
            "confusion": self.confusion.to_list(),
            "per_class": {
                c: {"precision": s.precision, "recall": s.recall, "f1": s.f1, "support": s.support}
                for c, s in ev.per_class.items()
            },
            "macro": {"precision": ev.macro_precision, "recall": ev.macro_recall, "f1": ev.macro_f1},
            "weighted": {"precision": ev.weighted_precision, "recall": ev.weighted_recall, "f1": ev.weighted_f1},
            "accuracy": ev.accuracy,
            "mcc": self.mcc,
            "never_predicted": list(ev.never_predicted),
            "folds": self.folds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def predictions_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["doc_id", "gold", "predicted"])
        w.writerows(self.predictions)
        return buf.getvalue()

    def outcomes(self) -> list[tuple[str, str]]:
        """(gold, predicted) pairs in dataset order, for paired significance tests."""
        return [(g, p) for _, g, p in self.predictions]


def _fold_report(fold: int, gold, pred, classes) -> dict:
    cm = ConfusionMatrix.from_labels(gold, pred, classes)
    return {"fold": fold, "n_test": cm.total, "confusion": cm.to_list(),
            "macro_f1": evaluate(cm).macro_f1}


def cross_validate(ds: LabeledDataset, k: int = 10, names: Sequence[str] | None = None,
                   kernel: str = "rbf", c: float = 1.0, gamma: float | None = None,
                   scaler_mode: str = "fold", seed: int = 0, workers: int = 1,
                   extra_config: dict | None = None) -> EvalReport:
    """k-fold evaluation; the confusion matrix is summed over folds before scoring.

    ``names`` restricts training to those columns. With ``scaler_mode="fold"`` the
    z-scaler is fit on each training split only; ``"global"`` fits it once on all rows.
    """
    if scaler_mode not in SCALER_MODES:
        raise ValueError(f"scaler_mode must be one of {SCALER_MODES}")
    if names is not None:
        ds = ds.select(names)
    if len(ds.classes) < 2:
        raise SingleClassDataset("cross-validation needs at least 2 classes")
    plan = make_folds(ds, k, seed)
    x_all = apply_scaler(fit_scaler(ds.x), ds.x) if scaler_mode == "global" else ds.x
    classes = ds.classes

    def run(fold: int):
        tr, te = plan.train_index(fold), plan.test_index(fold)
        xtr, xte = x_all[tr], x_all[te]
        if scaler_mode == "fold":
            sc = fit_scaler(xtr)
            xtr, xte = apply_scaler(sc, xtr), apply_scaler(sc, xte)
        model = train_svm(xtr, [ds.labels[i] for i in tr], kernel, c, gamma, ds.names)
        return te, predict_many(model, xte)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, range(k)))
    else:
        results = [run(f) for f in range(k)]

    pred = [""] * len(ds)
    folds = []
    for fold, (te, p) in enumerate(results):
        for i, label in zip(te, p):
            pred[i] = label
        folds.append(_fold_report(fold, [ds.labels[i] for i in te], p, classes))
    config = {
        "k": k, "kernel": kernel, "C": c,
        "gamma": gamma if gamma is not None else 1.0 / max(1, len(ds.names)),
        "scaler": scaler_mode, "seed": seed, "features": list(ds.names),
        **(extra_config or {}),
    }
    return EvalReport(config, classes, ConfusionMatrix.from_labels(ds.labels, pred, classes), folds,
                      list(zip(ds.ids, ds.labels, pred)))


def _majority(labels: Sequence[str]) -> str:
    counts = Counter(labels)
    return min(counts, key=lambda c: (-counts[c], c))


def zero_r(ds: LabeledDataset, k: int | None = None, seed: int = 0,
           extra_config: dict | None = None) -> EvalReport:
    """Always predict the majority training class (ties go to the smaller name).

    Without ``k`` the majority is taken over the whole dataset and scored on it;
    with ``k`` it is recomputed on each training split of the same fold plan the
    SVM would use.
    """
    classes = ds.classes
    folds = []
    if k is None:
        pred = [_majority(ds.labels)] * len(ds)
    else:
        plan = make_folds(ds, k, seed)
        pred = [""] * len(ds)
        for fold in range(k):
            guess = _majority([ds.labels[i] for i in plan.train_index(fold)])
            te = plan.test_index(fold)
            for i in te:
                pred[i] = guess
            folds.append(_fold_report(fold, [ds.labels[i] for i in te], [guess] * len(te), classes))
    config = {"classifier": "ZeroR", "k": k, "seed": seed, **(extra_config or {})}
    return EvalReport(config, classes, ConfusionMatrix.from_labels(ds.labels, pred, classes), folds,
                      list(zip(ds.ids, ds.labels, pred)))
