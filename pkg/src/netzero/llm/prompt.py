"""Zero-shot prompt and answer parsing."""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from typing import Optional, Union

from ..errors import InputError
from ..labels import TargetLabel

PROMPT_TEMPLATE = (
    "Your task is to classify a provided text whether it contains claims about Reduction or Net Zero "
    "targets or none of them. \n"
    "\n"
    "Reduction targets are claims that refer to an absolute or relative reduction of emissions, often "
    "accompanied by a baseline year to which the reduction target is compared.\n"
    "Net zero targets represent a special case of reduction targets where an institution states to bring "
    "its emissions balance down to no additional net emissions by a certain year.\n"
    "If both targets appear in the text, the main focus of the text is decisive. For instance, most "
    "reduction targets serve as intermediary steps for the final goal of net zero. Thus, the focus lies "
    "on net zero.\n"
    "\n"
    "As an answer to the provided text, please only respond with 'Reduction' for reduction targets, "
    "'Net Zero' for Net Zero targets or 'None' if no category applies.\n"
    "\n"
    "Provided text: ^^^{text}^^^ "
)

UNPARSEABLE = "UNPARSEABLE"

CANONICAL_ANSWERS = {
    TargetLabel.NET_ZERO: "Net Zero",
    TargetLabel.REDUCTION: "Reduction",
    TargetLabel.NONE: "None",
}

_ANSWER_TOKENS = {"net zero": TargetLabel.NET_ZERO, "reduction": TargetLabel.REDUCTION, "none": TargetLabel.NONE}
_TOKEN_RES = {tok: re.compile(rf"\b{tok}\b") for tok in _ANSWER_TOKENS}
_STRIP = string.whitespace + string.punctuation + "‘’“”"


def build_prompt(text: str) -> str:
    if not text or not text.strip():
        raise InputError("cannot build a prompt for empty text")
    # str.format would choke on braces inside the text
    return PROMPT_TEMPLATE.replace("{text}", text)


@dataclass(frozen=True)
class LLMVerdict:
    raw_response: str
    parsed: Union[TargetLabel, str]
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.parsed != UNPARSEABLE


def _normalize(raw: str) -> str:
    s = raw.casefold().replace("-", " ")
    return " ".join(s.split()).strip(_STRIP)


def parse_response(raw: str) -> LLMVerdict:
    """Map a chat answer to a label.

    An exact answer token wins; otherwise the answer must mention exactly one
    of the three tokens, anything else is UNPARSEABLE.
    """
    norm = _normalize(raw or "")
    if norm in _ANSWER_TOKENS:
        return LLMVerdict(raw, _ANSWER_TOKENS[norm])
    found = {lab for tok, lab in _ANSWER_TOKENS.items() if _TOKEN_RES[tok].search(norm)}
    if len(found) == 1:
        return LLMVerdict(raw, found.pop())
    return LLMVerdict(raw, UNPARSEABLE)
