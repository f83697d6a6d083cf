"""Inter-annotator agreement: raw agreement and Cohen's kappa."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .. import _kernels
from ..errors import InputShape


@dataclass(frozen=True)
class AgreementReport:
    raw_agreement: float
    cohens_kappa: float
    n: int


def contingency(a: Sequence, b: Sequence) -> tuple[np.ndarray, list]:
    """Square count table over the union of labels seen in ``a`` and ``b``."""
    cats = sorted(set(a) | set(b), key=str)
    index = {c: i for i, c in enumerate(cats)}
    rows = np.fromiter((index[x] for x in a), dtype=np.int64, count=len(a))
    cols = np.fromiter((index[x] for x in b), dtype=np.int64, count=len(b))
    return _kernels.pair_counts(rows, cols, len(cats), len(cats)), cats


def compute_agreement(a: Sequence, b: Sequence) -> AgreementReport:
    if len(a) != len(b):
        raise InputShape(f"label sequences differ in length: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise InputShape("label sequences are empty")
    table, _ = contingency(a, b)
    n = table.sum()
    p_o = np.trace(table) / n
    p_e = float(table.sum(axis=1) @ table.sum(axis=0)) / (n * n)
    # both raters constant and equal: chance agreement is total
    kappa = 1.0 if np.isclose(p_e, 1.0) else (p_o - p_e) / (1.0 - p_e)
    return AgreementReport(raw_agreement=float(p_o), cohens_kappa=float(kappa), n=int(n))
