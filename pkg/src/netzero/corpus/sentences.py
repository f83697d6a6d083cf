"""Rule-based sentence splitting for transcripts."""

from __future__ import annotations

import re

# lower-cased, without the trailing period
ABBREVIATIONS = frozenset("""
mr mrs ms dr prof sr jr st mt inc ltd co corp plc llc bros dept est approx
vs etc e.g i.e cf al fig no nos vol jan feb mar apr jun jul aug sep sept oct nov dec
u.s u.k e.u a.m p.m ph.d
""".split())

# a terminator run, optional closing quotes/brackets, then whitespace
_BOUNDARY = re.compile(r"[.!?]+[\"')\]”’]*(?=\s)")
_PARAGRAPH = re.compile(r"\n\s*\n")
_CLOSERS = "\"')]”’"


def _is_abbreviation(text: str, dot: int) -> bool:
    """True if the period at ``dot`` ends an abbreviation or an initial."""
    start = dot
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    word = text[start:dot].lstrip("(\"'“").lower()
    # single initials such as "J. Smith"
    return word in ABBREVIATIONS or (len(word) == 1 and word.isalpha())


def _split_block(block: str) -> list[str]:
    out, start = [], 0
    for m in _BOUNDARY.finditer(block):
        if m.group().rstrip(_CLOSERS) == "." and _is_abbreviation(block, m.start()):
            continue
        piece = block[start:m.end()].strip()
        if piece:
            out.append(piece)
        start = m.end()
    tail = block[start:].strip()
    if tail:
        out.append(tail)
    return out


def split_sentences(body: str) -> list[str]:
    """Sentences in order; blank lines always end a sentence.

    Splits happen only at whitespace, so every non-whitespace character
    of the input (in particular every number such as "3.5") survives intact.
    """
    out: list[str] = []
    for block in _PARAGRAPH.split(body or ""):
        out.extend(" ".join(s.split()) for s in _split_block(block))
    return out
