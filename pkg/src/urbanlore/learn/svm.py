"""Soft-margin SVM trained with SMO, one-vs-one for more than two classes.

The solver follows the libSVM dual formulation: minimize
``0.5 a'Qa - e'a`` subject to ``0 <= a_i <= C`` and ``y'a = 0`` with
``Q_ij = y_i y_j K(x_i, x_j)``. Each iteration picks the maximal violating
pair and solves the two-variable subproblem analytically.
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import FormatError, NonFiniteFeature, SchemaMismatch, SingleClassDataset

__all__ = [
    "BinaryModel",
    "BinarySolution",
    "KERNELS",
    "SvmModel",
    "decision_values",
    "kernel_matrix",
    "kkt_violation",
    "load_model",
    "predict",
    "predict_many",
    "save_model",
    "smo",
    "train_svm",
]

log = logging.getLogger(__name__)

KERNELS = ("linear", "rbf")
TOLERANCE = 1e-3
TIE_EPS = 1e-12
MODEL_FORMAT = "urbanlore-svm/1"


def kernel_matrix(kind: str, gamma: float, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gram block ``K(a_i, b_j)``."""
    if kind == "linear":
        return a @ b.T
    if kind == "rbf":
        sq = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :] - 2.0 * (a @ b.T)
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise ValueError(f"unknown kernel {kind!r}")


class _RowCache:
    """LRU cache of kernel rows with a byte budget."""

    def __init__(self, x: np.ndarray, kind: str, gamma: float, budget_bytes: int = 64 << 20):
        self.x, self.kind, self.gamma = x, kind, gamma
        self.capacity = max(2, budget_bytes // max(1, 8 * len(x)))
        self.rows: OrderedDict[int, np.ndarray] = OrderedDict()

    def __call__(self, i: int) -> np.ndarray:
        row = self.rows.get(i)
        if row is not None:
            self.rows.move_to_end(i)
            return row
        row = kernel_matrix(self.kind, self.gamma, self.x[i:i + 1], self.x)[0]
        self.rows[i] = row
        if len(self.rows) > self.capacity:
            self.rows.popitem(last=False)
        return row


@dataclass
class BinarySolution:
    alpha: np.ndarray
    bias: float
    iterations: int
    converged: bool


def smo(x: np.ndarray, y: np.ndarray, kind: str, gamma: float, c: float,
        tol: float = TOLERANCE, max_iter: int | None = None) -> BinarySolution:
    """Solve the binary dual for labels ``y`` in {+1, -1}.

    Decision function of the result: ``sum_i alpha_i y_i K(x_i, x) + bias``.
    """
    n = len(y)
    y = y.astype(np.float64)
    max_iter = max(100_000, 100 * n) if max_iter is None else max_iter
    row = _RowCache(x, kind, gamma)
    if kind == "rbf":
        qd = np.ones(n)
    else:
        qd = (x * x).sum(axis=1)
    alpha = np.zeros(n)
    grad = -np.ones(n)
    pos = y > 0
    it = 0
    converged = False
    while it < max_iter:
        yg = -y * grad
        up = np.where(pos, alpha < c, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < c)
        i = int(np.argmax(np.where(up, yg, -np.inf)))
        j = int(np.argmin(np.where(low, yg, np.inf)))
        if not up[i] or not low[j] or yg[i] - yg[j] < tol:
            converged = True
            break
        it += 1
        ki, kj = row(i), row(j)
        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = max(qd[i] + qd[j] + 2 * y[i] * y[j] * ki[j], 1e-12)
            delta = (-grad[i] - grad[j]) / quad
            diff = old_i - old_j
            ai, aj = old_i + delta, old_j + delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0:
                if ai > c:
                    ai, aj = c, c - diff
            elif aj > c:
                aj, ai = c, c + diff
        else:
            quad = max(qd[i] + qd[j] - 2 * y[i] * y[j] * ki[j], 1e-12)
            delta = (grad[i] - grad[j]) / quad
            total = old_i + old_j
            ai, aj = old_i - delta, old_j + delta
            if total > c:
                if ai > c:
                    ai, aj = c, total - c
            elif aj < 0:
                aj, ai = 0.0, total
            if total > c:
                if aj > c:
                    aj, ai = c, total - c
            elif ai < 0:
                ai, aj = 0.0, total
        alpha[i], alpha[j] = ai, aj
        grad += y * (y[i] * ki * (ai - old_i) + y[j] * kj * (aj - old_j))
    if not converged:
        log.warning("SMO stopped at max_iter=%d before reaching tolerance %g", max_iter, tol)
    return BinarySolution(alpha, _bias(alpha, y, grad, c), it, converged)


def _bias(alpha: np.ndarray, y: np.ndarray, grad: np.ndarray, c: float) -> float:
    yg = y * grad
    free = (alpha > 0) & (alpha < c)
    if free.any():
        rho = float(yg[free].mean())
    else:
        at_upper = alpha >= c
        ub_mask = np.where(at_upper, y < 0, y > 0)
        lb_mask = np.where(at_upper, y > 0, y < 0)
        ub = float(yg[ub_mask].min()) if ub_mask.any() else math.inf
        lb = float(yg[lb_mask].max()) if lb_mask.any() else -math.inf
        rho = (ub + lb) / 2 if math.isfinite(ub) and math.isfinite(lb) else (ub if math.isfinite(ub) else lb)
    return -rho


def kkt_violation(x: np.ndarray, y: np.ndarray, alpha: np.ndarray, bias: float,
                  kind: str, gamma: float, c: float) -> float:
    """Largest KKT violation of a binary solution, measured on ``y f(x) - 1``."""
    y = y.astype(np.float64)
    f = kernel_matrix(kind, gamma, x, x) @ (alpha * y) + bias
    m = y * f - 1.0
    eps = 1e-12 * max(1.0, c)
    lower = alpha <= eps
    upper = alpha >= c - eps
    viol = np.where(lower, np.maximum(0.0, -m), np.where(upper, np.maximum(0.0, m), np.abs(m)))
    return float(viol.max()) if len(viol) else 0.0


@dataclass(frozen=True, eq=False)
class BinaryModel:
    """Sub-model separating ``positive`` (margin > 0) from ``negative``."""

    positive: str
    negative: str
    support_vectors: np.ndarray
    dual_coef: np.ndarray  # alpha_i * y_i
    bias: float

    def margins(self, kind: str, gamma: float, x: np.ndarray) -> np.ndarray:
        if len(self.dual_coef) == 0:
            return np.full(len(x), self.bias)
        return kernel_matrix(kind, gamma, x, self.support_vectors) @ self.dual_coef + self.bias


@dataclass(frozen=True, eq=False)
class SvmModel:
    kernel: str
    c: float
    gamma: float
    classes: tuple[str, ...]
    names: tuple[str, ...]
    pairs: tuple[BinaryModel, ...]

    @property
    def n_features(self) -> int:
        return len(self.names)

    @property
    def schema_hash(self) -> str:
        return hashlib.sha256("\x1f".join(self.names).encode()).hexdigest()[:16]


def _check_finite(x: np.ndarray) -> None:
    if not np.isfinite(x).all():
        r, col = np.argwhere(~np.isfinite(x))[0]
        raise NonFiniteFeature(f"non-finite value at row {r}, column {col}")


def train_svm(x, labels: Sequence[str], kernel: str = "rbf", c: float = 1.0,
              gamma: float | None = None, names: Sequence[str] | None = None,
              tol: float = TOLERANCE) -> SvmModel:
    """Fit one binary SMO problem per class pair (sorted class names).

    ``gamma`` defaults to ``1 / n_features``.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("x must be 2-dimensional")
    if len(labels) != len(x):
        raise ValueError("labels and rows differ in length")
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}")
    if not c > 0:
        raise ValueError("C must be positive")
    _check_finite(x)
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise SingleClassDataset(f"training needs at least 2 classes, got {list(classes)}")
    nf = x.shape[1]
    gamma = (1.0 / nf if nf else 1.0) if gamma is None else float(gamma)
    names = tuple(names) if names is not None else tuple(f"f{i}" for i in range(nf))
    if len(names) != nf:
        raise SchemaMismatch(f"{len(names)} names for {nf} columns")
    lab = np.asarray(labels)
    pairs = []
    for a in range(len(classes)):
        for b in range(a + 1, len(classes)):
            idx = np.flatnonzero((lab == classes[a]) | (lab == classes[b]))
            xs = x[idx]
            ys = np.where(lab[idx] == classes[a], 1.0, -1.0)
            sol = smo(xs, ys, kernel, gamma, c, tol)
            sv = sol.alpha > 0
            pairs.append(BinaryModel(classes[a], classes[b], xs[sv].copy(),
                                     (sol.alpha * ys)[sv].copy(), float(sol.bias)))
    return SvmModel(kernel, float(c), gamma, classes, names, tuple(pairs))


def _as_matrix(model: SvmModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != model.n_features:
        raise SchemaMismatch(f"expected {model.n_features} features, got {x.shape[1]}")
    return x


def decision_values(model: SvmModel, x) -> np.ndarray:
    """Margins with shape (rows, pairs); pair order is ``model.pairs``."""
    x = _as_matrix(model, x)
    return np.column_stack([p.margins(model.kernel, model.gamma, x) for p in model.pairs])


def _vote(model: SvmModel, margins: np.ndarray) -> str:
    votes = dict.fromkeys(model.classes, 0)
    strength = dict.fromkeys(model.classes, 0.0)
    for p, m in zip(model.pairs, margins):
        if abs(m) <= TIE_EPS:
            continue
        win = p.positive if m > 0 else p.negative
        votes[win] += 1
        strength[win] += abs(m)
    return min(model.classes, key=lambda k: (-votes[k], -strength[k], k))


def predict_many(model: SvmModel, x) -> list[str]:
    return [_vote(model, row) for row in decision_values(model, x)]


def predict(model: SvmModel, vector) -> str:
    """Majority vote over pairs; ties go to the larger summed |margin|, then the smaller name."""
    return predict_many(model, vector)[0]


def save_model(model: SvmModel, path: str | Path) -> None:
    """JSON header line followed by little-endian float64 sections."""
    sections = []
    blobs = []
    offset = 0
    for p in model.pairs:
        for name, arr in (("sv", p.support_vectors), ("coef", p.dual_coef)):
            data = np.ascontiguousarray(arr, dtype="<f8").tobytes()
            sections.append({"pair": [p.positive, p.negative], "name": name,
                             "shape": list(arr.shape), "offset": offset, "bytes": len(data)})
            blobs.append(data)
            offset += len(data)
    payload = b"".join(blobs)
    header = {
        "format": MODEL_FORMAT,
        "kernel": model.kernel,
        "C": model.c,
        "gamma": model.gamma,
        "classes": list(model.classes),
        "names": list(model.names),
        "schema_hash": model.schema_hash,
        "biases": [p.bias for p in model.pairs],
        "sections": sections,
        "sha256": hashlib.sha256(payload).hexdigest(),
    }
    with Path(path).open("wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        fh.write(payload)


def load_model(path: str | Path) -> SvmModel:
    raw = Path(path).read_bytes()
    nl = raw.find(b"\n")
    try:
        header = json.loads(raw[:nl])
    except (ValueError, UnicodeDecodeError) as exc:
        raise FormatError(1, f"bad model header: {exc}", str(path)) from None
    if header.get("format") != MODEL_FORMAT:
        raise FormatError(1, f"unsupported model format {header.get('format')!r}", str(path))
    payload = raw[nl + 1:]
    if hashlib.sha256(payload).hexdigest() != header["sha256"]:
        raise FormatError(2, "model payload checksum mismatch", str(path))
    arrays: dict[tuple[str, str, str], np.ndarray] = {}
    for s in header["sections"]:
        buf = payload[s["offset"]:s["offset"] + s["bytes"]]
        arrays[(*s["pair"], s["name"])] = np.frombuffer(buf, dtype="<f8").reshape(s["shape"]).astype(np.float64)
    classes = tuple(header["classes"])
    pairs = []
    k = 0
    for a in range(len(classes)):
        for b in range(a + 1, len(classes)):
            pa, pb = classes[a], classes[b]
            pairs.append(BinaryModel(pa, pb, arrays[(pa, pb, "sv")], arrays[(pa, pb, "coef")],
                                     float(header["biases"][k])))
            k += 1
    return SvmModel(header["kernel"], float(header["C"]), float(header["gamma"]), classes,
                    tuple(header["names"]), tuple(pairs))
