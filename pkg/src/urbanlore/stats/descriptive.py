"""Per-label means and population standard deviations, with table rendering."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import EmptyGroup
from ..features import COVERAGE_DIMS

__all__ = ["GroupSummary", "describe", "render_table"]


@dataclass(frozen=True, eq=False)
class GroupSummary:
    labels: tuple[str, ...]
    names: tuple[str, ...]
    mean: np.ndarray  # (labels, dims)
    std: np.ndarray
    n: tuple[int, ...]

    def get(self, label: str, name: str) -> tuple[float, float]:
        i, j = self.labels.index(label), self.names.index(name)
        return float(self.mean[i, j]), float(self.std[i, j])

    def rows(self) -> list[tuple[str, str, float, float, int]]:
        return [(lab, name, float(self.mean[i, j]), float(self.std[i, j]), self.n[i])
                for i, lab in enumerate(self.labels) for j, name in enumerate(self.names)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "dimension", "mean", "std", "n"])
        for lab, name, m, s, n in self.rows():
            w.writerow([lab, name, repr(m), repr(s), n])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "names": list(self.names),
                "rows": [dict(zip(("label", "dimension", "mean", "std", "n"), r)) for r in self.rows()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def describe(matrix, labels: Sequence[str], names: Sequence[str],
             label_order: Sequence[str] | None = None) -> GroupSummary:
    """Mean and population sigma of every column, per label.

    ``label_order`` fixes the row order; a listed label with no rows raises
    :class:`EmptyGroup`. By default labels are sorted.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != len(labels) or m.shape[1] != len(names):
        raise ValueError("matrix shape does not match labels and names")
    lab = np.asarray(labels)
    order = tuple(label_order) if label_order is not None else tuple(sorted(set(labels)))
    means, stds, counts = [], [], []
    for label in order:
        rows = m[lab == label]
        if len(rows) == 0:
            raise EmptyGroup(f"label {label!r} has no documents")
        means.append(rows.mean(axis=0))
        stds.append(rows.std(axis=0))
        counts.append(len(rows))
    return GroupSummary(order, tuple(names), np.array(means), np.array(stds), tuple(counts))


def render_table(summary: GroupSummary, names: Sequence[str] | None = None,
                 percent: Sequence[str] = COVERAGE_DIMS) -> str:
    """Aligned text table: one row per label plus an overall mean row, mu/sigma per column.

    Coverage dimensions are printed as percentages.
    """
    names = list(names) if names is not None else list(summary.names)
    pct = set(percent)

    def fmt(name: str, v: float) -> str:
        return f"{100 * v:.2f}%" if name in pct else f"{v:.2f}"

    header = [""]
    for n in names:
        header += [f"{n} mu", "sigma"]
    body = []
    cols = [summary.names.index(n) for n in names]
    for i, label in enumerate(summary.labels):
        row = [label]
        for n, j in zip(names, cols):
            row += [fmt(n, summary.mean[i, j]), fmt(n, summary.std[i, j])]
        body.append(row)
    avg = ["Average"]
    for n, j in zip(names, cols):
        avg += [fmt(n, summary.mean[:, j].mean()), fmt(n, summary.std[:, j].mean())]
    table = [header, *body, avg]
    widths = [max(len(r[c]) for r in table) for c in range(len(header))]
    rule = "-" * (sum(widths) + 2 * (len(widths) - 1))
    lines = []
    for k, r in enumerate(table):
        cells = [r[0].ljust(widths[0])] + [cell.rjust(w) for cell, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
        if k in (0, len(table) - 2):
            lines.append(rule)
    return "\n".join(lines) + "\n"
