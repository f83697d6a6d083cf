"""Classification metrics computed from a confusion matrix."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .. import _kernels


@dataclass(frozen=True)
class FoldMetrics:
    accuracy: float
    f1: float
    precision: float
    recall: float

    def to_dict(self) -> dict:
        return asdict(self)


METRIC_NAMES = ("accuracy", "f1", "precision", "recall")


def confusion_matrix(gold: Sequence, pred: Sequence, labels: Sequence) -> np.ndarray:
    """Rows are gold labels, columns predicted, both in ``labels`` order.

    Predictions outside ``labels`` (e.g. unparseable LLM answers) are dropped
    from the table; callers that must score them as errors use
    :func:`metrics_from_predictions`.
    """
    index = {lab: i for i, lab in enumerate(labels)}
    keep = [(index[g], index[p]) for g, p in zip(gold, pred) if p in index]
    if not keep:
        return np.zeros((len(labels), len(labels)), dtype=np.int64)
    rows, cols = map(np.asarray, zip(*keep))
    return _kernels.pair_counts(rows, cols, len(labels), len(labels))


def _safe_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros_like(num, dtype=np.float64)
    np.divide(num, den, out=out, where=den > 0)
    return out


def metrics_from_confusion(cm: np.ndarray, average: str = "macro", extra_support: np.ndarray | None = None) -> FoldMetrics:
    """Accuracy plus averaged precision/recall/F1.

    Macro and weighted averages run over classes present in gold or
    prediction. ``extra_support`` adds per-gold-class samples whose prediction
    fell outside the label set; they count as errors.
    """
    cm = np.asarray(cm)
    tp = np.diag(cm).astype(np.float64)
    pred_pos = cm.sum(axis=0).astype(np.float64)
    support = cm.sum(axis=1).astype(np.float64)
    if extra_support is not None:
        support = support + extra_support
    n = support.sum()
    if n == 0:
        raise ValueError("empty confusion matrix")
    precision = _safe_div(tp, pred_pos)
    recall = _safe_div(tp, support)
    f1 = _safe_div(2 * precision * recall, precision + recall)
    accuracy = tp.sum() / n
    present = (support > 0) | (pred_pos > 0)
    if average == "micro":
        p = tp.sum() / pred_pos.sum() if pred_pos.sum() else 0.0
        r = accuracy
        f = 2 * p * r / (p + r) if p + r else 0.0
        return FoldMetrics(float(accuracy), float(f), float(p), float(r))
    if average == "macro":
        w = present.astype(np.float64)
    elif average == "weighted":
        w = support
    else:
        raise ValueError(f"unknown average {average!r}")
    w = w / w.sum()
    return FoldMetrics(
        accuracy=float(accuracy),
        f1=float(f1 @ w),
        precision=float(precision @ w),
        recall=float(recall @ w),
    )


def metrics_from_predictions(gold: Sequence, pred: Sequence, labels: Sequence, average: str = "macro"):
    """Metrics and confusion matrix; predictions outside ``labels`` are errors."""
    cm = confusion_matrix(gold, pred, labels)
    index = {lab: i for i, lab in enumerate(labels)}
    extra = np.zeros(len(labels))
    for g, p in zip(gold, pred):
        if p not in index:
            extra[index[g]] += 1
    return metrics_from_confusion(cm, average, extra_support=extra), cm


def summarize(per_fold: Sequence[FoldMetrics]) -> tuple[dict, dict]:
    """Mean and sample standard deviation (n-1) of each metric across folds."""
    arr = np.array([[getattr(m, k) for k in METRIC_NAMES] for m in per_fold], dtype=np.float64)
    mean = arr.mean(axis=0)
    std = arr.std(axis=0, ddof=1) if len(arr) > 1 else np.zeros(len(METRIC_NAMES))
    return dict(zip(METRIC_NAMES, mean.tolist())), dict(zip(METRIC_NAMES, std.tolist()))
