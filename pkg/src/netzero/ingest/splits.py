"""Seeded stratified k-fold splitting."""

from __future__ import annotations

from collections import defaultdict
from typing import Sequence

import numpy as np

from ..errors import StratificationInfeasible
from .records import LabeledSample

Split = tuple[list[LabeledSample], list[LabeledSample]]


def fold_assignment(labels: Sequence, k: int, seed: int) -> np.ndarray:
    """Fold index per position: shuffle within each label, then deal round-robin.

    Labels are visited in sorted order and every label starts dealing at fold
    0, so per-label fold sizes differ by at most one and the larger folds are
    always the low-numbered ones.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    by_label: dict = defaultdict(list)
    for i, lab in enumerate(labels):
        by_label[lab].append(i)
    short = {str(lab): len(ix) for lab, ix in by_label.items() if len(ix) < k}
    if short:
        raise StratificationInfeasible(f"labels with fewer than k={k} samples: {short}")
    rng = np.random.default_rng(seed)
    folds = np.empty(len(labels), dtype=np.int64)
    for lab in sorted(by_label, key=str):
        ix = np.array(by_label[lab], dtype=np.int64)
        rng.shuffle(ix)
        folds[ix] = np.arange(len(ix)) % k
    return folds


def stratified_kfold(samples: Sequence[LabeledSample], k: int = 5, *, seed: int) -> list[Split]:
    folds = fold_assignment([s.label for s in samples], k, seed)
    splits = []
    for f in range(k):
        train = [s for s, g in zip(samples, folds) if g != f]
        val = [s for s, g in zip(samples, folds) if g == f]
        splits.append((train, val))
    return splits


def stratified_subsample(samples: Sequence[LabeledSample], fraction: float, *, seed: int) -> list[LabeledSample]:
    """Keep ``round(fraction * n_label)`` samples of each label, original order kept."""
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    rng = np.random.default_rng(seed)
    by_label: dict = defaultdict(list)
    for i, s in enumerate(samples):
        by_label[s.label].append(i)
    keep: list[int] = []
    for lab in sorted(by_label, key=str):
        ix = np.array(by_label[lab])
        rng.shuffle(ix)
        keep.extend(ix[: max(1, round(fraction * len(ix)))].tolist())
    return [samples[i] for i in sorted(keep)]
