"""Label vocabularies shared by every stage of the toolkit.

Member order is significant: it fixes the column order of probability
vectors and confusion matrices, and it breaks argmax ties.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, Type, Union


class TargetLabel(str, Enum):
    NET_ZERO = "NET_ZERO"
    REDUCTION = "REDUCTION"
    NONE = "NONE"


class BinaryLabel(str, Enum):
    """Reduction-model labels: net-zero and reduction targets merged."""

    TARGET = "TARGET"
    NONE = "NONE"


class ClimateLabel(str, Enum):
    """Stage-1 labels for the climate-relevance filter."""

    CLIMATE = "CLIMATE"
    NOT_CLIMATE = "NOT_CLIMATE"


Label = Union[TargetLabel, BinaryLabel, ClimateLabel]
LabelType = Type[Enum]

_BY_NUM_LABELS = {3: TargetLabel, 2: BinaryLabel}


def label_type_for(num_labels: int) -> LabelType:
    try:
        return _BY_NUM_LABELS[num_labels]
    except KeyError:
        raise ValueError(f"num_labels must be 2 or 3, got {num_labels}") from None


def label_index(label_type: LabelType) -> dict:
    return {lab: i for i, lab in enumerate(label_type)}


def parse_label(value: str, label_type: LabelType = TargetLabel) -> Label:
    """Parse a serialized label; accepts member names or values, any case."""
    key = str(value).strip().upper().replace(" ", "_").replace("-", "_")
    try:
        return label_type[key]
    except KeyError:
        raise ValueError(f"{value!r} is not a {label_type.__name__}") from None


def infer_label_type(values: Iterable[str]) -> LabelType:
    """Pick the vocabulary a set of serialized labels belongs to.

    An all-NONE column is ambiguous and resolves to ``TargetLabel``.
    """
    seen = {str(v).strip().upper() for v in values}
    if "TARGET" in seen:
        return BinaryLabel
    if seen & {"CLIMATE", "NOT_CLIMATE"}:
        return ClimateLabel
    return TargetLabel
