"""Confusion matrices, precision/recall/F1 and multiclass MCC."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import EmptyMatrix

__all__ = ["ClassScores", "ConfusionMatrix", "Evaluation", "evaluate", "mcc_multiclass"]


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Counts with rows = gold class and columns = predicted class."""

    classes: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        k = len(self.classes)
        if counts.shape != (k, k):
            raise ValueError(f"counts shape {counts.shape} does not match {k} classes")
        if (counts < 0).any():
            raise ValueError("negative count")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_labels(cls, gold: Sequence[str], pred: Sequence[str], classes: Sequence[str] | None = None):
        if len(gold) != len(pred):
            raise ValueError("gold and predicted lengths differ")
        classes = tuple(sorted(set(gold) | set(pred))) if classes is None else tuple(classes)
        index = {c: i for i, c in enumerate(classes)}
        counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
        for g, p in zip(gold, pred):
            counts[index[g], index[p]] += 1
        return cls(classes, counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if self.classes != other.classes:
            raise ValueError("class sets differ")
        return ConfusionMatrix(self.classes, self.counts + other.counts)

    def to_list(self) -> list[list[int]]:
        return self.counts.tolist()


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int
    predicted: int


@dataclass(frozen=True)
class Evaluation:
    per_class: dict[str, ClassScores]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    accuracy: float
    never_predicted: tuple[str, ...]


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def evaluate(cm: ConfusionMatrix) -> Evaluation:
    """Per-class and averaged precision, recall and F1.

    Precision of a class that is never predicted is 0 by convention; such classes
    are listed in ``never_predicted``. Macro averages are unweighted class means;
    weighted averages weight each class by its gold support.
    """
    n = cm.total
    if n == 0:
        raise EmptyMatrix("confusion matrix is empty")
    c = cm.counts
    rows, cols, diag = c.sum(axis=1), c.sum(axis=0), np.diag(c)
    per = {}
    for k, name in enumerate(cm.classes):
        p = diag[k] / cols[k] if cols[k] else 0.0
        r = diag[k] / rows[k] if rows[k] else 0.0
        per[name] = ClassScores(float(p), float(r), _f1(float(p), float(r)), int(rows[k]), int(cols[k]))
    scores = list(per.values())
    k = len(scores)
    w = rows / n
    return Evaluation(
        per_class=per,
        macro_precision=math.fsum(s.precision for s in scores) / k,
        macro_recall=math.fsum(s.recall for s in scores) / k,
        macro_f1=math.fsum(s.f1 for s in scores) / k,
        weighted_precision=math.fsum(wi * s.precision for wi, s in zip(w, scores)),
        weighted_recall=math.fsum(wi * s.recall for wi, s in zip(w, scores)),
        weighted_f1=math.fsum(wi * s.f1 for wi, s in zip(w, scores)),
        accuracy=float(diag.sum() / n),
        never_predicted=tuple(name for name, s in per.items() if s.predicted == 0),
    )


def mcc_multiclass(cm: ConfusionMatrix) -> float:
    """Gorodkin's K-class Matthews correlation coefficient.

    ``(N * trace - sum_k t_k p_k) / sqrt((N^2 - sum_k p_k^2) (N^2 - sum_k t_k^2))``
    with ``t`` the gold totals and ``p`` the predicted totals; 0 when either
    factor under the root is 0.
    """
    n = cm.total
    if n == 0:
        raise EmptyMatrix("confusion matrix is empty")
    c = cm.counts.astype(np.float64)
    t, p = c.sum(axis=1), c.sum(axis=0)
    cov_xy = n * np.trace(c) - float(t @ p)
    cov_xx = n * n - float(p @ p)
    cov_yy = n * n - float(t @ t)
    if cov_xx == 0 or cov_yy == 0:
        return 0.0
    return float(cov_xy / math.sqrt(cov_xx * cov_yy))
