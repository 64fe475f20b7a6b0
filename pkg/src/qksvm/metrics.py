"""Confusion-matrix based classification metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidArgumentError


@dataclass
class EvalReport:
    confusion: np.ndarray
    accuracy: float
    precision: float
    recall: float
    f1: float
    averaging: str
    per_class_precision: np.ndarray
    per_class_recall: np.ndarray
    per_class_f1: np.ndarray

    @property
    def n_samples(self) -> int:
        return int(self.confusion.sum())

    def to_dict(self) -> dict:
        return {
            "confusion": self.confusion.tolist(),
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "averaging": self.averaging,
            "per_class": {
                "precision": self.per_class_precision.tolist(),
                "recall": self.per_class_recall.tolist(),
                "f1": self.per_class_f1.tolist(),
            },
        }


def _safe_ratio(num, den):
    return np.divide(num, den, out=np.zeros_like(num, dtype=float), where=den > 0)


def evaluate(y_true, y_pred, n_classes: int | None = None) -> EvalReport:
    """Accuracy, precision, recall and F1 from integer labels.

    Rows of the confusion matrix are true classes, columns predictions.
    Binary problems (``n_classes == 2``) report class 1 as the positive
    class; otherwise scores are macro-averaged. Zero denominators give 0.
    """
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise InvalidArgumentError(f"length mismatch: {y_true.shape} vs {y_pred.shape}")
    if y_true.size == 0:
        raise InvalidArgumentError("nothing to evaluate")
    if n_classes is None:
        n_classes = int(max(y_true.max(), y_pred.max())) + 1
    if min(y_true.min(), y_pred.min()) < 0 or max(y_true.max(), y_pred.max()) >= n_classes:
        raise InvalidArgumentError(f"labels must lie in [0, {n_classes})")

    confusion = np.zeros((n_classes, n_classes), dtype=int)
    np.add.at(confusion, (y_true, y_pred), 1)
    tp = np.diag(confusion).astype(float)
    precision = _safe_ratio(tp, confusion.sum(axis=0).astype(float))
    recall = _safe_ratio(tp, confusion.sum(axis=1).astype(float))
    f1 = _safe_ratio(2 * precision * recall, precision + recall)
    accuracy = float(tp.sum() / y_true.size)

    if n_classes == 2:
        averaging, pick = "binary", lambda v: float(v[1])
    else:
        averaging, pick = "macro", lambda v: float(v.mean())
    return EvalReport(
        confusion, accuracy, pick(precision), pick(recall), pick(f1), averaging,
        precision, recall, f1,
    )
