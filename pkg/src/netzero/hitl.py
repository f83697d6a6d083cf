"""Label auditing loop: export misclassifications, review offline, re-import.

Review file (UTF-8 CSV, ``\\n`` line endings, header row)::

    sample_id,text,gold_label,predicted_label,fold,round,correction,reviewer_note

``gold_label`` and ``fold`` are empty for hand-check samples that never went
through cross-validation. ``correction`` is empty (keep), a label value, or
``REMOVE``. Removed samples are not deleted from the dataset; they are
listed in an exclusions file (header ``sample_id,round,reviewer_note``) and
filtered out with :func:`active_samples`.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InputError, MissingPredictions, UnknownSample
from .labels import LabelType, infer_label_type, parse_label

logger = logging.getLogger(__name__)

REMOVE = "REMOVE"
REVIEW_COLUMNS = ("sample_id", "text", "gold_label", "predicted_label", "fold", "round", "correction", "reviewer_note")
EXCLUSION_COLUMNS = ("sample_id", "round", "reviewer_note")


@dataclass(frozen=True)
class ReviewItem:
    sample_id: str
    text: str
    gold_label: Optional[Enum]
    predicted_label: Enum
    fold: Optional[int]
    round: int
    correction: Optional[Enum | str] = None
    reviewer_note: str = ""

    def __post_init__(self):
        if self.correction is not None and self.correction != REMOVE and not isinstance(self.correction, Enum):
            raise InputError(f"{self.sample_id}: correction must be a label or {REMOVE}, got {self.correction!r}")


@dataclass(frozen=True)
class Exclusion:
    sample_id: str
    round: int
    reviewer_note: str = ""


def _cell(value) -> str:
    if value is None:
        return ""
    return value.value if isinstance(value, Enum) else str(value)


def write_review(items: Sequence[ReviewItem], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REVIEW_COLUMNS)
        for it in items:
            w.writerow([_cell(getattr(it, c)) for c in REVIEW_COLUMNS])
    return path


def read_review(path: str | Path, label_type: LabelType | None = None) -> list[ReviewItem]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(REVIEW_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise InputError(f"{path}: review file lacks columns {sorted(missing)}")
        rows = list(reader)
    if label_type is None:
        label_type = infer_label_type(
            v for r in rows for v in (r["gold_label"], r["predicted_label"], r["correction"]) if v and v.upper() != REMOVE
        )
    items = []
    for lineno, r in enumerate(rows, 2):
        try:
            corr = r["correction"].strip()
            items.append(ReviewItem(
                sample_id=r["sample_id"],
                text=r["text"],
                gold_label=parse_label(r["gold_label"], label_type) if r["gold_label"] else None,
                predicted_label=parse_label(r["predicted_label"], label_type),
                fold=int(r["fold"]) if r["fold"] else None,
                round=int(r["round"]),
                correction=(REMOVE if corr.upper() == REMOVE else parse_label(corr, label_type)) if corr else None,
                reviewer_note=r["reviewer_note"] or "",
            ))
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
    return items


def write_exclusions(exclusions: Sequence[Exclusion], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EXCLUSION_COLUMNS)
        for e in exclusions:
            w.writerow([e.sample_id, e.round, e.reviewer_note])
    return path


def read_exclusions(path: str | Path) -> list[Exclusion]:
    path = Path(path)
    if not path.exists():
        return []
    with path.open(newline="", encoding="utf-8") as fh:
        return [Exclusion(r["sample_id"], int(r["round"]), r["reviewer_note"] or "") for r in csv.DictReader(fh)]


# --------------------------------------------------------------------------


def collect_misclassifications(cv_report, round: int) -> list[ReviewItem]:
    """Review items for every held-out prediction that disagrees with gold, sorted by (fold, id)."""
    if getattr(cv_report, "predictions", None) is None:
        raise MissingPredictions("cross-validation run kept no per-sample predictions")
    items = [
        ReviewItem(p.sample_id, p.text, p.gold, p.predicted, p.fold, round)
        for p in cv_report.predictions
        if p.predicted != p.gold
    ]
    items.sort(key=lambda it: (it.fold, it.sample_id))
    return items


def _index(items: Iterable[ReviewItem]) -> dict[str, ReviewItem]:
    out: dict[str, ReviewItem] = {}
    for it in items:
        if it.sample_id in out:
            raise InputError(f"sample {it.sample_id!r} appears twice in the review file")
        out[it.sample_id] = it
    return out


def apply_corrections(dataset: Sequence, review: Sequence[ReviewItem]) -> list:
    """Relabel corrected samples and record each change in their audit trail.

    REMOVE corrections leave the sample in place; see :func:`exclusions_from`.
    Applying the same review twice changes nothing the second time.
    """
    by_id = _index(review)
    ids = {s.id for s in dataset}
    for sid, it in by_id.items():
        if it.correction is not None and sid not in ids:
            raise UnknownSample(sid)
    out = []
    for s in dataset:
        it = by_id.get(s.id)
        if it is None or it.correction is None or it.correction == REMOVE:
            out.append(s)
            continue
        if type(it.correction) is not type(s.label):
            raise InputError(f"{s.id}: correction {it.correction!r} is not a {type(s.label).__name__}")
        if it.correction == s.label:
            logger.warning("%s: correction equals current label %s; skipped", s.id, s.label.value)
            out.append(s)
            continue
        if s.audit and s.audit[-1].round >= it.round:
            raise InputError(f"{s.id}: already audited in round {s.audit[-1].round}, cannot apply round {it.round}")
        out.append(s.relabel(it.correction, it.round))
    return out


def exclusions_from(review: Sequence[ReviewItem], existing: Sequence[Exclusion] = ()) -> list[Exclusion]:
    """Existing tombstones plus REMOVE corrections, one per sample id."""
    out = list(existing)
    seen = {e.sample_id for e in out}
    for it in review:
        if it.correction == REMOVE and it.sample_id not in seen:
            out.append(Exclusion(it.sample_id, it.round, it.reviewer_note))
            seen.add(it.sample_id)
    return out


def active_samples(dataset: Sequence, exclusions: Sequence[Exclusion]) -> list:
    dropped = {e.sample_id for e in exclusions}
    return [s for s in dataset if s.id not in dropped]


def revert_audit(dataset: Sequence, to_round: int = 0) -> list:
    """Undo, newest first, every audited relabel later than ``to_round``."""
    out = []
    for s in dataset:
        audit = list(s.audit)
        label = s.label
        while audit and audit[-1].round > to_round:
            entry = audit.pop()
            if entry.new_label != label:
                raise InputError(f"{s.id}: audit trail inconsistent with current label")
            label = entry.old_label
        out.append(replace(s, label=label, audit=tuple(audit)))
    return out


def round_seed(master_seed: int, round: int) -> int:
    """Fresh stratification seed for a review round."""
    return int(np.random.SeedSequence([master_seed, round]).generate_state(1)[0])


def run_round(dataset: Sequence, config, round: int, k: int = 5, backend=None, exclusions: Sequence[Exclusion] = ()):
    """Cross-validate the active samples with a round-specific seed; returns (report, review items)."""
    from .classifier.training import cross_validate

    cfg = replace(config, seed=round_seed(config.seed, round))
    report = cross_validate(active_samples(dataset, exclusions), cfg, k=k, backend=backend, keep_predictions=True)
    return report, collect_misclassifications(report, round)
