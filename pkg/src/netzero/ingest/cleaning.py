"""Text normalisation and short-sample filtering."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import replace
from typing import Sequence

from .records import LabeledSample

URL_RE = re.compile(r"(?:https?://|ftp://|www\.)\S+", re.IGNORECASE)
_WS_RE = re.compile(r"\s+")

# punctuation kept verbatim; ?! are kept as sentence terminators
_KEEP_PUNCT = set(".,;:%()-'\"/&?!°")

_TRANSLATE = str.maketrans({
    "‘": "'", "’": "'", "‚": "'", "′": "'",
    "“": '"', "”": '"', "„": '"', "″": '"',
    "‐": "-", "‑": "-", "‒": "-", "–": "-", "—": "-", "−": "-",
    " ": " ",
})


def _keep(ch: str) -> bool:
    if ch in _KEEP_PUNCT:
        return True
    cat = unicodedata.category(ch)
    # letters, combining marks, numbers (incl. subscripts as in CO₂), currency
    return cat[0] in "LMN" or cat == "Sc"


def clean_text(text: str) -> str:
    """Remove URLs and special characters, collapse whitespace.

    Case and accents are left untouched. Removed characters become spaces so
    neighbouring tokens are never glued together.
    """
    if not text:
        return ""
    text = URL_RE.sub(" ", text.translate(_TRANSLATE))
    text = "".join(ch if ch.isspace() or _keep(ch) else " " for ch in text)
    text = URL_RE.sub(" ", text)
    return _WS_RE.sub(" ", text).strip()


def word_count(text: str) -> int:
    return len(clean_text(text).split())


def filter_short(samples: Sequence[LabeledSample], min_words: int = 5) -> list[LabeledSample]:
    if min_words < 1:
        raise ValueError("min_words must be >= 1")
    return [s for s in samples if word_count(s.text) >= min_words]


def clean_samples(samples: Sequence[LabeledSample], min_words: int = 5) -> list[LabeledSample]:
    """Clean every text, then drop those shorter than ``min_words``."""
    cleaned = [replace(s, text=clean_text(s.text)) for s in samples]
    return filter_short(cleaned, min_words)
