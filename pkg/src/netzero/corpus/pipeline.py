"""Two-stage labelling of transcript sentences and target-share time series.

Stage 1 marks climate-related sentences; stage 2 assigns a target label to
those sentences only. Shares are per event with all sentences of the event as
denominator, and the yearly index averages event shares.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from .. import _kernels
from ..errors import EmptyEvent, InputError, ModelFailure
from ..labels import ClimateLabel, TargetLabel
from .documents import Document
from .sentences import split_sentences

logger = logging.getLogger(__name__)

_TARGETS = tuple(TargetLabel)
_TARGET_INDEX = {lab: i for i, lab in enumerate(_TARGETS)}


@dataclass(frozen=True)
class SentenceRecord:
    doc_id: str
    index: int
    text: str
    is_climate: bool
    target: TargetLabel

    def __post_init__(self):
        if self.target is not TargetLabel.NONE and not self.is_climate:
            raise InputError(f"{self.doc_id}:{self.index}: target label on a non-climate sentence")

    @property
    def sample_id(self) -> str:
        return f"{self.doc_id}:{self.index}"


@dataclass(frozen=True)
class EventShare:
    doc_id: str
    share_net_zero: float
    share_reduction: float
    n_sentences: int
    quarter: tuple[int, int] | None = None


@dataclass(frozen=True)
class YearlyIndex:
    year: int
    mean_share_net_zero: float
    mean_share_reduction: float
    n_events: int


class YearlyMode(str, Enum):
    EVENT = "event"  # every event weighs the same
    QUARTER = "quarter"  # quarterly means first, then their mean


# --------------------------------------------------------------------------
# classification


def _predict_labels(model, texts: Sequence[str], offsets: Sequence[int], stage: str) -> list:
    """Labels for ``texts``; on failure, locate the offending sentence."""
    try:
        return [p.label for p in model.predict(list(texts))]
    except Exception as exc:
        for text, idx in zip(texts, offsets):
            try:
                model.predict([text])
            except Exception as inner:
                raise ModelFailure(f"{stage} model failed on sentence {idx}: {inner}", idx) from inner
        raise ModelFailure(f"{stage} model failed: {exc}") from exc


def two_stage_classify(
    sentences: Sequence[str],
    climate_model,
    target_model,
    doc_id: str = "",
    climate_label: Enum = ClimateLabel.CLIMATE,
) -> list[SentenceRecord]:
    """Stage 2 sees only the sentences stage 1 marked climate-related."""
    sentences = list(sentences)
    if not sentences:
        return []
    stage1 = _predict_labels(climate_model, sentences, range(len(sentences)), "climate")
    is_climate = [lab == climate_label for lab in stage1]
    climate_idx = [i for i, c in enumerate(is_climate) if c]
    targets = [TargetLabel.NONE] * len(sentences)
    if climate_idx:
        stage2 = _predict_labels(target_model, [sentences[i] for i in climate_idx], climate_idx, "target")
        for i, lab in zip(climate_idx, stage2):
            if not isinstance(lab, TargetLabel):
                raise ModelFailure(f"target model returned {lab!r}, not a TargetLabel", i)
            targets[i] = lab
    return [SentenceRecord(doc_id, i, s, c, t) for i, (s, c, t) in enumerate(zip(sentences, is_climate, targets))]


def classify_document(doc: Document, climate_model, target_model) -> list[SentenceRecord]:
    try:
        return two_stage_classify(split_sentences(doc.body), climate_model, target_model, doc.doc_id)
    except ModelFailure as exc:
        raise ModelFailure(f"{doc.doc_id}: {exc}", exc.index) from exc


# --------------------------------------------------------------------------
# aggregation


def event_share(records: Sequence[SentenceRecord], quarter: tuple[int, int] | None = None) -> EventShare:
    if not records:
        raise EmptyEvent("event has no sentences")
    doc_ids = {r.doc_id for r in records}
    if len(doc_ids) != 1:
        raise InputError(f"records span several documents: {sorted(doc_ids)}")
    n = len(records)
    nz = sum(r.target is TargetLabel.NET_ZERO for r in records)
    red = sum(r.target is TargetLabel.REDUCTION for r in records)
    return EventShare(records[0].doc_id, nz / n, red / n, n, quarter)


def event_shares(records: Sequence[SentenceRecord], quarters: dict[str, tuple[int, int]] | None = None) -> list[EventShare]:
    """Per-document shares for a pooled record list, sorted by doc_id."""
    if not records:
        return []
    doc_ids = sorted({r.doc_id for r in records})
    pos = {d: i for i, d in enumerate(doc_ids)}
    rows = np.fromiter((pos[r.doc_id] for r in records), dtype=np.int64, count=len(records))
    cols = np.fromiter((_TARGET_INDEX[r.target] for r in records), dtype=np.int64, count=len(records))
    counts = _kernels.pair_counts(rows, cols, len(doc_ids), len(_TARGETS))
    totals = counts.sum(axis=1)
    nz, red = _TARGET_INDEX[TargetLabel.NET_ZERO], _TARGET_INDEX[TargetLabel.REDUCTION]
    quarters = quarters or {}
    return [
        EventShare(d, float(counts[i, nz] / totals[i]), float(counts[i, red] / totals[i]), int(totals[i]), quarters.get(d))
        for i, d in enumerate(doc_ids)
    ]


def _group_means(keys: list, values: np.ndarray) -> tuple[list, np.ndarray, np.ndarray]:
    uniq = sorted(set(keys))
    pos = {k: i for i, k in enumerate(uniq)}
    idx = np.array([pos[k] for k in keys], dtype=np.int64)
    sums, counts = _kernels.group_sums(idx, values, len(uniq))
    return uniq, sums / counts[:, None], counts


def yearly_index(shares: Sequence[EventShare], mode: YearlyMode | str = YearlyMode.EVENT) -> list[YearlyIndex]:
    """Mean event share per calendar year, ascending; years without events are absent.

    Events are reduced in doc_id order, so the result does not depend on the
    order of ``shares``.
    """
    mode = YearlyMode(mode)
    if not shares:
        return []
    if any(s.quarter is None for s in shares):
        raise InputError("every event share needs its quarter for yearly aggregation")
    ordered = sorted(shares, key=lambda s: s.doc_id)
    if len({s.doc_id for s in ordered}) != len(ordered):
        raise InputError("duplicate doc_id among event shares")
    values = np.array([[s.share_net_zero, s.share_reduction] for s in ordered], dtype=np.float64)
    if mode is YearlyMode.EVENT:
        years, means, counts = _group_means([s.quarter[0] for s in ordered], values)
    else:
        quarters, q_means, q_counts = _group_means([tuple(s.quarter) for s in ordered], values)
        years, means, _ = _group_means([q[0] for q in quarters], q_means)
        counts = np.array([q_counts[[q[0] == y for q in quarters]].sum() for y in years])
    return [
        YearlyIndex(int(y), float(means[i, 0]), float(means[i, 1]), int(counts[i]))
        for i, y in enumerate(years)
    ]


# --------------------------------------------------------------------------
# output

TIMESERIES_COLUMNS = ("year", "mean_share_net_zero", "mean_share_reduction", "n_events")


def emit_timeseries(
    indices: Sequence[YearlyIndex], path: str | Path, with_plot: bool = False, plot_path: str | Path | None = None
) -> list[Path]:
    """CSV with shortest round-trip float formatting; optionally a PNG line plot next to it."""
    if not indices:
        raise InputError("no yearly indices to write")
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TIMESERIES_COLUMNS)
        for ix in indices:
            w.writerow([ix.year, repr(ix.mean_share_net_zero), repr(ix.mean_share_reduction), ix.n_events])
    written = [path]
    if with_plot:
        written.append(plot_timeseries(indices, plot_path or path.with_suffix(".png")))
    return written


def read_timeseries(path: str | Path) -> list[YearlyIndex]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return [
            YearlyIndex(int(r["year"]), float(r["mean_share_net_zero"]), float(r["mean_share_reduction"]), int(r["n_events"]))
            for r in csv.DictReader(fh)
        ]


def plot_timeseries(indices: Sequence[YearlyIndex], path: str | Path) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    years = [ix.year for ix in indices]
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ax.plot(years, [100 * ix.mean_share_net_zero for ix in indices], marker="o", label="net zero")
    ax.plot(years, [100 * ix.mean_share_reduction for ix in indices], marker="s", label="reduction")
    ax.set_xlabel("year")
    ax.set_ylabel("% of all sentences")
    ax.xaxis.get_major_locator().set_params(integer=True)
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    # fixed metadata keeps the PNG byte-stable across runs
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return Path(path)


# --------------------------------------------------------------------------


@dataclass
class CorpusResult:
    records: list[SentenceRecord]
    shares: list[EventShare]
    yearly: list[YearlyIndex]


def analyze_corpus(
    docs: Sequence[Document],
    climate_model,
    target_model,
    workers: int = 1,
    mode: YearlyMode | str = YearlyMode.EVENT,
) -> CorpusResult:
    """Classify each document (in parallel when ``workers`` > 1), then reduce in doc_id order."""
    docs = sorted(docs, key=lambda d: d.doc_id)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            per_doc = list(pool.map(lambda d: classify_document(d, climate_model, target_model), docs))
    else:
        per_doc = [classify_document(d, climate_model, target_model) for d in docs]
    records = [r for recs in per_doc for r in recs]
    empty = [d.doc_id for d, recs in zip(docs, per_doc) if not recs]
    if empty:
        raise EmptyEvent(f"no sentences in {empty}")
    shares = event_shares(records, {d.doc_id: d.quarter for d in docs})
    logger.info("analyzed %d documents, %d sentences", len(docs), len(records))
    return CorpusResult(records, shares, yearly_index(shares, mode))


def sample_for_handcheck(records: Sequence[SentenceRecord], n_random: int, seed: int, include_targets: bool = True):
    """All target-labelled sentences plus a seeded random fill of the rest, as review items."""
    from ..hitl import ReviewItem

    if n_random < 0:
        raise InputError("n_random must be >= 0")
    ordered = sorted(records, key=lambda r: (r.doc_id, r.index))
    targets = [r for r in ordered if r.target is not TargetLabel.NONE] if include_targets else []
    rest = [r for r in ordered if r.target is TargetLabel.NONE]
    if n_random > len(rest):
        logger.warning("only %d non-target sentences available, %d requested", len(rest), n_random)
    pick = np.random.default_rng(seed).choice(len(rest), size=min(n_random, len(rest)), replace=False)
    chosen = targets + [rest[i] for i in sorted(pick)]
    chosen.sort(key=lambda r: (r.doc_id, r.index))
    return [ReviewItem(r.sample_id, r.text, None, r.target, None, 0) for r in chosen]
