"""Evaluation metrics: F-beta for thresholding, ROC-AUC for ranking,
and the classical k-sigma labeling baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_label_vector, as_score_vector
from .errors import UndefinedMetricError


@dataclass(frozen=True)
class ConfusionCounts:
    """2x2 confusion counts; positive class = outlier (label 1)."""

    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion_counts(pred: np.ndarray, truth: np.ndarray) -> ConfusionCounts:
    pred = as_label_vector(pred)
    truth = as_label_vector(truth)
    if pred.size != truth.size:
        raise ValueError("prediction and truth lengths differ")
    return ConfusionCounts(
        tp=int(((pred == 1) & (truth == 1)).sum()),
        fp=int(((pred == 1) & (truth == 0)).sum()),
        fn=int(((pred == 0) & (truth == 1)).sum()),
        tn=int(((pred == 0) & (truth == 0)).sum()),
    )


def f_beta(pred: np.ndarray, truth: np.ndarray, beta: float) -> float:
    """(1 + b^2) * P * R / (b^2 * P + R), 0.0 whenever tp = 0.

    beta < 1 tilts towards precision (outlier-set quality), beta > 1
    towards recall. Truth without any positive is rejected: recall is
    undefined there even under the tp = 0 convention.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    c = confusion_counts(pred, truth)
    if c.tp + c.fn == 0:
        raise UndefinedMetricError("truth contains no positive labels")
    if c.tp == 0:
        return 0.0
    precision = c.tp / (c.tp + c.fp)
    recall = c.tp / (c.tp + c.fn)
    b2 = beta * beta
    return (1.0 + b2) * precision * recall / (b2 * precision + recall)


def _midranks(scores: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the mean rank of their block."""
    order = np.argsort(scores, kind="stable")
    sorted_scores = scores[order]
    boundaries = np.flatnonzero(sorted_scores[1:] != sorted_scores[:-1]) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [scores.size]))
    block_rank = (starts + ends - 1) / 2.0 + 1.0
    ranks_sorted = np.repeat(block_rank, ends - starts)
    ranks = np.empty(scores.size)
    ranks[order] = ranks_sorted
    return ranks


def roc_auc(scores: np.ndarray, truth: np.ndarray) -> float:
    """Ranking accuracy as the Mann-Whitney statistic with 0.5 tie credit.

    Equals the fraction of (outlier, inlier) pairs ranked correctly and
    matches trapezoidal integration of the ROC curve exactly.
    """
    scores = as_score_vector(scores)
    truth = as_label_vector(truth)
    if scores.size != truth.size:
        raise ValueError("scores and truth lengths differ")
    n_pos = int(truth.sum())
    n_neg = truth.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("ROC-AUC needs both classes in the truth labels")
    ranks = _midranks(scores)
    u = float(ranks[truth == 1].sum()) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def k_sigma_labels(s: np.ndarray, k: float) -> np.ndarray:
    """Classical rule: outlier iff score >= mean + k * std.

    Zero dispersion labels everything inlier (the rule is vacuous there).
    """
    s = as_score_vector(s)
    if s.size < 2:
        raise ValueError("k-sigma labeling needs >= 2 scores")
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    mu, sigma = float(s.mean()), float(s.std())
    if sigma == 0.0:
        return np.zeros(s.size, dtype=np.int64)
    return (s >= mu + k * sigma).astype(np.int64)
