"""Confusion matrices, accuracy scores and label alignment."""
from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

EXHAUSTIVE_LIMIT = 8


class MetricError(ValueError):
    pass


@dataclass
class ConfusionMatrix:
    """``counts[i, j]``: points with true label i and predicted label j."""

    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def normalized(self) -> np.ndarray:
        rows = self.counts.sum(axis=1, keepdims=True).astype(float)
        out = np.zeros(self.counts.shape, dtype=float)
        np.divide(self.counts, rows, out=out, where=rows > 0)
        return out

    def to_json(self) -> str:
        return json.dumps({"counts": self.counts.tolist(),
                           "normalized": self.normalized().tolist()}, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["true"] + [f"pred{j}" for j in range(self.counts.shape[1])])
        for i, row in enumerate(self.counts):
            writer.writerow([i] + [int(x) for x in row])
        return buf.getvalue()


def confusion(true_labels, pred_labels, n_true: int | None = None,
              n_pred: int | None = None) -> ConfusionMatrix:
    t = np.asarray(true_labels, dtype=int)
    p = np.asarray(pred_labels, dtype=int)
    if t.shape != p.shape:
        raise MetricError(f"label lengths differ: {t.size} vs {p.size}")
    if t.size and (t.min() < 0 or p.min() < 0):
        raise MetricError("labels must be non-negative")
    n_true = max(n_true or 0, int(t.max()) + 1 if t.size else 0)
    n_pred = max(n_pred or 0, int(p.max()) + 1 if p.size else 0)
    counts = np.zeros((n_true, n_pred), dtype=int)
    np.add.at(counts, (t, p), 1)
    return ConfusionMatrix(counts)


def _check(cm: ConfusionMatrix) -> np.ndarray:
    if cm.counts.size == 0 or cm.total == 0:
        raise MetricError("empty confusion matrix")
    return cm.counts


def _square(counts: np.ndarray) -> np.ndarray:
    k = max(counts.shape)
    out = np.zeros((k, k), dtype=counts.dtype)
    out[:counts.shape[0], :counts.shape[1]] = counts
    return out


def raw_accuracy(cm: ConfusionMatrix) -> float:
    counts = _check(cm)
    return float(np.trace(_square(counts)) / counts.sum())


def balanced_accuracy(cm: ConfusionMatrix) -> float:
    """Mean recall over true classes that have at least one point."""
    counts = _square(_check(cm))
    support = counts.sum(axis=1)
    nonempty = support > 0
    recall = np.diag(counts)[nonempty] / support[nonempty]
    return float(recall.mean())


def weighted_precision(cm: ConfusionMatrix) -> float:
    """Support-weighted precision; undefined when a class with support has
    no predicted members."""
    counts = _square(_check(cm))
    support = counts.sum(axis=1)
    predicted = counts.sum(axis=0)
    empty = [c for c in range(len(support)) if support[c] > 0 and predicted[c] == 0]
    if empty:
        raise MetricError(
            f"weighted precision undefined: predicted classes {empty} are empty"
        )
    used = support > 0
    precision = np.diag(counts)[used] / predicted[used]
    return float(np.sum(support[used] / support.sum() * precision))


def scores(cm: ConfusionMatrix) -> dict:
    """All three scores; weighted precision is None (with a reason) when undefined."""
    out = {"balanced_accuracy": balanced_accuracy(cm), "raw_accuracy": raw_accuracy(cm)}
    try:
        out["weighted_precision"] = weighted_precision(cm)
    except MetricError as exc:
        out["weighted_precision"] = None
        out["weighted_precision_note"] = str(exc)
    return out


def align_labels(true_labels, pred_labels) -> np.ndarray:
    """Relabelling of predictions that maximizes agreement with the truth.

    Returns ``perm`` such that ``perm[pred_labels]`` is the aligned
    labelling. Exhaustive search for up to eight classes, Hungarian
    assignment above.
    """
    counts = _square(confusion(true_labels, pred_labels).counts)
    k = counts.shape[0]
    if k <= EXHAUSTIVE_LIMIT:
        perm = _best_permutation(counts)
    else:
        rows, cols = linear_sum_assignment(-counts.T)
        perm = np.empty(k, dtype=int)
        perm[rows] = cols
    return perm


def _best_permutation(counts: np.ndarray) -> np.ndarray:
    k = counts.shape[0]
    perms = np.array(list(itertools.permutations(range(k))), dtype=int)
    # trace after mapping predicted j -> perm[j] is sum_j counts[perm[j], j]
    totals = counts[perms, np.arange(k)].sum(axis=1)
    return perms[int(np.argmax(totals))]
