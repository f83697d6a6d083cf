"""Assemble the three-class training set from Tracker claims and non-target texts."""

from __future__ import annotations

import logging
from typing import Iterable, Mapping, Sequence

from ..labels import TargetLabel
from .cleaning import clean_samples
from .records import LabeledSample, Provenance, RawClaim
from .sublabels import aggregate_label

logger = logging.getLogger(__name__)


def stable_id(prefix: str, key: str, taken: set[str]) -> str:
    """``prefix-key``, suffixed ``#2``, ``#3``... on collision."""
    base = f"{prefix}-{key}"
    sid, n = base, 1
    while sid in taken:
        n += 1
        sid = f"{base}#{n}"
    taken.add(sid)
    return sid


def claims_to_samples(
    claims: Iterable[RawClaim],
    mapping: Mapping[str, TargetLabel] | None = None,
    taken: set[str] | None = None,
) -> list[LabeledSample]:
    taken = set() if taken is None else taken
    return [
        LabeledSample(
            id=stable_id("nzt", c.source_id, taken),
            text=c.text,
            label=aggregate_label(c.fine_label, mapping),
            provenance=Provenance.TRACKER,
        )
        for c in claims
    ]


def non_target_samples(texts: Iterable[tuple[str, str]], taken: set[str] | None = None) -> list[LabeledSample]:
    """``texts`` yields (source_id, text) pairs from non-target corpora."""
    taken = set() if taken is None else taken
    return [
        LabeledSample(
            id=stable_id("nt", src, taken),
            text=text,
            label=TargetLabel.NONE,
            provenance=Provenance.NON_TARGET_SOURCE,
        )
        for src, text in texts
    ]


def build_dataset(
    claims: Sequence[RawClaim],
    non_targets: Sequence[tuple[str, str]] = (),
    mapping: Mapping[str, TargetLabel] | None = None,
    min_words: int = 5,
) -> list[LabeledSample]:
    taken: set[str] = set()
    raw = claims_to_samples(claims, mapping, taken) + non_target_samples(non_targets, taken)
    kept = clean_samples(raw, min_words)
    logger.info("ingest: %d raw samples, %d after cleaning (min_words=%d)", len(raw), len(kept), min_words)
    return kept
