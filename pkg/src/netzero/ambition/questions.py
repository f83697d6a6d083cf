from __future__ import annotations

from enum import Enum


class AmbitionDimension(str, Enum):
    NZ_TARGET_YEAR = "NZ_TARGET_YEAR"
    RED_TARGET_YEAR = "RED_TARGET_YEAR"
    RED_BASE_YEAR = "RED_BASE_YEAR"
    RED_PERCENTAGE = "RED_PERCENTAGE"

    @property
    def is_year(self) -> bool:
        return self is not AmbitionDimension.RED_PERCENTAGE

    @classmethod
    def parse(cls, value: str) -> "AmbitionDimension":
        key = value.strip().upper().replace("-", "_")
        try:
            return cls[key]
        except KeyError:
            raise ValueError(f"unknown ambition dimension {value!r}; expected one of {[d.value for d in cls]}") from None


QUESTIONS = {
    AmbitionDimension.NZ_TARGET_YEAR: "When does the organization want to achieve net zero?",
    AmbitionDimension.RED_TARGET_YEAR: "By which year does the organization want to reduce its emissions?",
    AmbitionDimension.RED_BASE_YEAR: (
        "What is the baseline year or level for the target to which the reduction target is compared to?"
    ),
    AmbitionDimension.RED_PERCENTAGE: "What is the reduction target of the organization in %?",
}


def question_for(dimension: AmbitionDimension) -> str:
    return QUESTIONS[AmbitionDimension(dimension)]
