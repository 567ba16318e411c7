"""Ranking metrics and repeat aggregation for binary interaction scoring."""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import SingleClassError, ValidationError

DIAGONAL_REGIME = "diagonal-same-graph"
CROSS_REGIME = "cross-dataset"


def _check_scored(scores, labels):
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValidationError(f"scores {scores.shape} and labels {labels.shape} must be equal 1-d")
    if not np.isin(labels, (0, 1)).all():
        raise ValidationError("labels must be 0 or 1")
    return scores, labels.astype(int)


def auroc(scores, labels) -> float:
    """Probability a positive outscores a negative, ties counted half.

    Rank-sum (Mann-Whitney) form, exact for tied scores via average ranks.
    """
    scores, labels = _check_scored(scores, labels)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("auroc needs at least one positive and one negative")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores))
    sorted_scores = scores[order]
    # average ranks over tie groups, ranks are 1-based
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i: j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    pos_rank_sum = ranks[labels == 1].sum()
    return float((pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def auprc(scores, labels) -> float:
    """Average precision: sum of precision-weighted recall increments.

    Thresholds sweep descending score; tied scores enter at one threshold.
    """
    scores, labels = _check_scored(scores, labels)
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise SingleClassError("auprc needs at least one positive")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    ap = 0.0
    tp = 0
    seen = 0
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        group_tp = int(sorted_labels[i: j + 1].sum())
        tp += group_tp
        seen += j - i + 1
        if group_tp:
            precision = tp / seen
            ap += precision * (group_tp / n_pos)
        i = j + 1
    return float(ap)


def aggregate(runs) -> tuple[float, float]:
    """Mean and sample standard deviation (n-1 denominator, 0 when n=1)."""
    values = np.asarray(list(runs), dtype=float)
    if values.size == 0:
        raise ValidationError("aggregate needs at least one run")
    mean = float(values.mean())
    std = 0.0 if values.size == 1 else float(values.std(ddof=1))
    return mean, std


def format_aggregate(mean: float, std: float) -> str:
    return f"{mean:.3f} ± {std:.3f}"


@dataclass
class LeakageMatrix:
    """AUROC grid: rows train datasets, columns test datasets.

    Diagonal cells come from a 70/30 within-dataset protocol with embeddings
    computed on the full graph; off-diagonal cells train on one dataset and
    score another with that dataset's own embeddings.
    """

    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        self.labels = tuple(self.labels)
        n = len(self.labels)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (n, n):
            raise ValidationError(f"matrix shape {self.values.shape} does not match {n} labels")

    def regime(self, i: int, j: int) -> str:
        return DIAGONAL_REGIME if i == j else CROSS_REGIME

    def at(self, train_label: str, test_label: str) -> float:
        i = self.labels.index(train_label)
        j = self.labels.index(test_label)
        return float(self.values[i, j])

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["train", *self.labels])
            for i, name in enumerate(self.labels):
                writer.writerow([name] + [repr(float(v)) for v in self.values[i]])

    def write_long_csv(self, path) -> None:
        """Long form for plotting: train,test,auroc,regime."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["train", "test", "auroc", "regime"])
            for i, a in enumerate(self.labels):
                for j, b in enumerate(self.labels):
                    writer.writerow([a, b, repr(float(self.values[i, j])), self.regime(i, j)])

    @classmethod
    def read_csv(cls, path) -> "LeakageMatrix":
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
        labels = tuple(rows[0][1:])
        values = np.array([[float(c) for c in r[1:]] for r in rows[1:]])
        return cls(labels=labels, values=values)
