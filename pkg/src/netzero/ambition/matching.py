"""Does an extracted answer contain the gold number?"""

from __future__ import annotations

import math
import re
from typing import NamedTuple

from .questions import AmbitionDimension

# digits, optional thousands groups, optional decimal part; a comma only
# groups when exactly three digits follow it
NUMBER_RE = re.compile(r"\d+(?:,\d{3}(?!\d))*(?:\.\d+)?")


class NumericToken(NamedTuple):
    text: str
    value: float
    start: int
    end: int

    @property
    def is_plain_int(self) -> bool:
        return self.text.isdigit()


def numeric_tokens(text: str) -> list[NumericToken]:
    """Maximal numeric tokens; %, currency signs and thousands commas are not part of the value."""
    return [
        NumericToken(m.group(), float(m.group().replace(",", "")), m.start(), m.end())
        for m in NUMBER_RE.finditer(text)
    ]


def _is_year_token(tok: NumericToken) -> bool:
    return tok.is_plain_int and len(tok.text) == 4


def answer_matches(answer_text: str, gold_value: float, dimension: AmbitionDimension) -> bool:
    """True iff some numeric token of the answer equals the gold value.

    Year dimensions only accept plain four-digit tokens; percentages compare
    numerically, so "27.5%" matches 27.5 and "30.0" matches 30.
    """
    dimension = AmbitionDimension(dimension)
    for tok in numeric_tokens(answer_text or ""):
        if dimension.is_year:
            if _is_year_token(tok) and int(tok.text) == int(gold_value):
                return True
        elif math.isclose(tok.value, float(gold_value), rel_tol=0, abs_tol=1e-9):
            return True
    return False
