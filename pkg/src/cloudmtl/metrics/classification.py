"""Classification metrics: binary accuracy and area under the PR curve.

The PR curve sweeps thresholds over the distinct prediction scores in
descending order, grouping ties, and integrates with the step rule

    AU = sum_h (R_h - R_{h-1}) * P_h,    R_0 = 0

where R_h and P_h are recall and precision when everything scoring at least
the h-th distinct value is called positive.

The weighted (micro-averaged) variant pools several binary problems into
one score/label list before building a single curve, so every pixel
contributes once per class it participates in:

    R_h = sum_c TP_c(h) / sum_c P_c      P_h = sum_c TP_c(h) / sum_c (TP_c(h) + FP_c(h))
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import DimensionError, MetricUndefinedError, NumericError


def _validate_binary(scores: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.ndim != 1 or labels.ndim != 1 or scores.shape != labels.shape:
        raise DimensionError(
            f"scores {scores.shape} and labels {labels.shape} must be equal-length vectors")
    if scores.size == 0:
        raise MetricUndefinedError("PR curve undefined on empty input")
    if not np.all(np.isfinite(scores)):
        raise NumericError("scores contain non-finite values")
    labels_f = labels.astype(np.float64)
    if not np.all((labels_f == 0.0) | (labels_f == 1.0)):
        raise DimensionError("labels must be binary (0/1)")
    return scores, labels_f


def acc_binary(true_positive: np.ndarray, pred_positive: np.ndarray) -> float:
    """Fraction of agreeing entries between two boolean vectors."""
    t = np.asarray(true_positive).astype(bool)
    p = np.asarray(pred_positive).astype(bool)
    if t.shape != p.shape or t.ndim != 1:
        raise DimensionError(
            f"shapes {t.shape} and {p.shape} must be equal 1-D vectors")
    if t.size == 0:
        raise MetricUndefinedError("accuracy undefined on empty input")
    return float(np.mean(t == p))


def _pr_points(scores: np.ndarray, labels: np.ndarray
               ) -> tuple[np.ndarray, np.ndarray]:
    """Recall and precision at each distinct descending score threshold."""
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    tp_cum = np.cumsum(y)
    n_cum = np.arange(1, s.size + 1, dtype=np.float64)
    # last index of each tie group
    group_end = np.flatnonzero(np.diff(s) != 0)
    group_end = np.append(group_end, s.size - 1)
    total_pos = tp_cum[-1]
    tp = tp_cum[group_end]
    predicted = n_cum[group_end]
    recall = tp / total_pos
    precision = tp / predicted
    return recall, precision


def auprc_class(scores: np.ndarray, labels: np.ndarray) -> float:
    """Step-integrated area under the PR curve for one binary problem."""
    scores, labels = _validate_binary(scores, labels)
    if labels.sum() == 0:
        raise MetricUndefinedError("AUPRC undefined without positive labels")
    recall, precision = _pr_points(scores, labels)
    prev_r = np.concatenate(([0.0], recall[:-1]))
    return float(np.sum((recall - prev_r) * precision))


def auprc_weighted(class_problems: Sequence[tuple[np.ndarray, np.ndarray]]) -> float:
    """Micro-averaged AUPRC over several (scores, labels) binary problems.

    The problems are pooled into one list sharing a common threshold axis;
    passing a single problem reproduces :func:`auprc_class` exactly.
    """
    if not class_problems:
        raise MetricUndefinedError("weighted AUPRC needs at least one class")
    pooled_scores = []
    pooled_labels = []
    for scores, labels in class_problems:
        s, l = _validate_binary(scores, labels)
        pooled_scores.append(s)
        pooled_labels.append(l)
    scores = np.concatenate(pooled_scores)
    labels = np.concatenate(pooled_labels)
    if labels.sum() == 0:
        raise MetricUndefinedError("weighted AUPRC undefined without positive labels")
    recall, precision = _pr_points(scores, labels)
    prev_r = np.concatenate(([0.0], recall[:-1]))
    return float(np.sum((recall - prev_r) * precision))
