"""Label counts and word-length summary statistics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import EmptyDataset
from .records import LabeledSample


@dataclass(frozen=True)
class DatasetStats:
    count: int
    mean_len: float
    std_len: float
    min_len: int
    max_len: int
    p25: float
    p75: float
    per_label_counts: dict

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean_len": self.mean_len,
            "std_len": self.std_len,
            "min_len": self.min_len,
            "max_len": self.max_len,
            "p25": self.p25,
            "p75": self.p75,
            "per_label_counts": {k.value: v for k, v in self.per_label_counts.items()},
        }


def dataset_stats(samples: Sequence[LabeledSample]) -> DatasetStats:
    """Word-length statistics in the layout of a ``DataFrame.describe`` row.

    Lengths are whitespace tokens; std is the sample (n-1) estimate and is 0
    for a single sample; quartiles use linear interpolation.
    """
    if not samples:
        raise EmptyDataset("cannot summarise an empty dataset")
    lengths = np.array([len(s.text.split()) for s in samples], dtype=np.float64)
    label_type = type(samples[0].label)
    counts = {lab: 0 for lab in label_type}
    for s in samples:
        counts[s.label] = counts.get(s.label, 0) + 1
    p25, p75 = np.percentile(lengths, [25, 75])
    return DatasetStats(
        count=len(samples),
        mean_len=float(lengths.mean()),
        std_len=float(lengths.std(ddof=1)) if len(lengths) > 1 else 0.0,
        min_len=int(lengths.min()),
        max_len=int(lengths.max()),
        p25=float(p25),
        p75=float(p75),
        per_label_counts=counts,
    )

