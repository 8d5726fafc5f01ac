"""Accuracy / fairness objectives and the trade-off correlation."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import UndefinedCorrelationError, UndefinedTPRError
from .model import predict


class ObjectivePoint(NamedTuple):
    """Image of one model in objective space; both coordinates are minimised."""

    error: float
    delta_tpr: float


def _labels(a):
    return np.asarray(a).astype(np.int64).reshape(-1)


def accuracy(preds, truth) -> float:
    preds, truth = _labels(preds), _labels(truth)
    if preds.size != truth.size:
        raise ValueError(f"length mismatch: {preds.size} predictions, {truth.size} labels")
    if preds.size == 0:
        raise ValueError("accuracy of an empty prediction set is undefined")
    return float(np.count_nonzero(preds == truth)) / preds.size


def group_tpr(preds, truth, groups, g, y=1) -> float:
    """Empirical P[pred = y | group = g, truth = y]."""
    preds, truth, groups = _labels(preds), _labels(truth), _labels(groups)
    mask = (groups == g) & (truth == y)
    total = int(np.count_nonzero(mask))
    if total == 0:
        raise UndefinedTPRError(g, y)
    return float(np.count_nonzero(preds[mask] == y)) / total


def delta_tpr(preds, truth, groups) -> float:
    """Absolute gap in positive-class TPR between the two groups."""
    return abs(group_tpr(preds, truth, groups, 1, 1) - group_tpr(preds, truth, groups, 0, 1))


def evaluate_objectives(p, d) -> ObjectivePoint:
    """(1 - accuracy, delta TPR) of model ``p`` on dataset ``d``."""
    d.validate_fairness()
    preds = predict(p, d.features)
    return ObjectivePoint(1.0 - accuracy(preds, d.labels), delta_tpr(preds, d.labels, d.groups))


def pearson(xs, ys) -> float:
    xs = np.asarray(xs, dtype=np.float64).reshape(-1)
    ys = np.asarray(ys, dtype=np.float64).reshape(-1)
    if xs.size != ys.size:
        raise ValueError("pearson needs equal-length inputs")
    if xs.size < 2:
        raise UndefinedCorrelationError("pearson needs at least two points")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("pearson undefined for zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))

