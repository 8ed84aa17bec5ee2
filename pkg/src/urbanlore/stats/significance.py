"""Two-sample t and F tests and the paired approximate randomization test."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import DegenerateSample, LengthMismatch, ZeroVariance
from .special import f_sf, t_sf_two_sided

__all__ = ["FTestResult", "TTestResult", "approx_randomization", "f_test", "macro_f1_metric", "t_test"]


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: float
    p: float


@dataclass(frozen=True)
class FTestResult:
    f: float
    df: tuple[int, int]
    p: float


def _sample(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or len(arr) < 2:
        raise DegenerateSample(f"sample {name} needs at least 2 values, got {arr.size}")
    return arr


def t_test(a, b, equal_var: bool = True) -> TTestResult:
    """Two-sample t test, pooled variance by default and Welch's when ``equal_var`` is false.

    Zero variance with equal means gives ``t = 0, p = 1``; with different means
    ``t`` is infinite and ``p = 0``.
    """
    a, b = _sample(a, "a"), _sample(b, "b")
    n1, n2 = len(a), len(b)
    diff = float(a.mean() - b.mean())
    v1, v2 = float(a.var(ddof=1)), float(b.var(ddof=1))
    if equal_var:
        df = float(n1 + n2 - 2)
        pooled = ((n1 - 1) * v1 + (n2 - 1) * v2) / df
        se2 = pooled * (1.0 / n1 + 1.0 / n2)
    else:
        se2 = v1 / n1 + v2 / n2
        df = se2 * se2 / ((v1 / n1) ** 2 / (n1 - 1) + (v2 / n2) ** 2 / (n2 - 1)) if se2 > 0 else float(n1 + n2 - 2)
    if se2 == 0:
        if diff == 0:
            return TTestResult(0.0, df, 1.0)
        return TTestResult(math.copysign(math.inf, diff), df, 0.0)
    t = diff / math.sqrt(se2)
    return TTestResult(t, df, t_sf_two_sided(t, df))


def f_test(a, b) -> FTestResult:
    """Variance-ratio test with the larger sample variance on top; two-sided p capped at 1."""
    a, b = _sample(a, "a"), _sample(b, "b")
    va, vb = float(a.var(ddof=1)), float(b.var(ddof=1))
    if va == 0 or vb == 0:
        raise ZeroVariance("f-test needs both sample variances above zero")
    if va >= vb:
        f, df = va / vb, (len(a) - 1, len(b) - 1)
    else:
        f, df = vb / va, (len(b) - 1, len(a) - 1)
    return FTestResult(f, df, min(1.0, 2.0 * f_sf(f, *df)))


def macro_f1_metric(classes: Sequence[str]) -> Callable[[np.ndarray], float]:
    """Metric over an (n, 2) array of (gold index, predicted index) rows."""
    k = len(classes)

    def metric(pairs: np.ndarray) -> float:
        cm = np.bincount(pairs[:, 0] * k + pairs[:, 1], minlength=k * k).reshape(k, k)
        tp = np.diag(cm).astype(np.float64)
        denom = cm.sum(axis=0) + cm.sum(axis=1)
        f1 = np.divide(2 * tp, denom, out=np.zeros(k), where=denom > 0)
        return float(f1.mean())

    return metric


def approx_randomization(a, b, metric: Callable[[np.ndarray], float] | None = None,
                         rounds: int = 10_000, seed: int = 0) -> float:
    """Paired approximate randomization p-value for ``|metric(a) - metric(b)|``.

    ``a`` and ``b`` hold one outcome per instance (scalars, or rows such as
    (gold, predicted) index pairs). Each round swaps every instance's pair with
    probability 1/2. Returns ``(count(delta' >= delta) + 1) / (rounds + 1)``.
    ``metric`` defaults to the mean.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise LengthMismatch(f"outcome lists differ in shape: {a.shape} vs {b.shape}")
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    rng = np.random.default_rng(seed)
    n = len(a)
    if metric is None:
        a = a.astype(np.float64)
        b = b.astype(np.float64)
        observed = abs(a.mean() - b.mean()) if n else 0.0
        diff = a - b
        count = 0
        for start in range(0, rounds, 4096):
            swap = rng.random((min(4096, rounds - start), n)) < 0.5
            signed = np.where(swap, -diff, diff)
            shuffled = np.abs(signed.mean(axis=1)) if n else np.zeros(len(swap))
            count += int((shuffled >= observed - 1e-12).sum())
    else:
        observed = abs(metric(a) - metric(b))
        count = 0
        for _ in range(rounds):
            swap = rng.random(n) < 0.5
            mask = swap.reshape((n,) + (1,) * (a.ndim - 1))
            sa = np.where(mask, b, a)
            sb = np.where(mask, a, b)
            if abs(metric(sa) - metric(sb)) >= observed - 1e-12:
                count += 1
    return (count + 1) / (rounds + 1)
