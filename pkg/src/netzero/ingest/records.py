"""Dataset records and their JSON-lines serialization."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from ..errors import InputError
from ..labels import Label, LabelType, TargetLabel, infer_label_type, parse_label

logger = logging.getLogger(__name__)

ACTOR_TYPES = ("city", "company", "country", "region")


class Provenance(str, Enum):
    TRACKER = "TRACKER"
    NON_TARGET_SOURCE = "NON_TARGET_SOURCE"


@dataclass(frozen=True)
class AuditEntry:
    round: int
    old_label: Label
    new_label: Label


@dataclass(frozen=True)
class RawClaim:
    text: str
    fine_label: str
    actor_type: str
    source_id: str

    def __post_init__(self):
        if not self.text or not self.text.strip():
            raise InputError(f"claim {self.source_id!r} has empty text")
        if self.actor_type not in ACTOR_TYPES:
            raise InputError(f"claim {self.source_id!r}: actor_type {self.actor_type!r} not in {ACTOR_TYPES}")


@dataclass(frozen=True)
class LabeledSample:
    id: str
    text: str
    label: Label
    annotator_label: Optional[Label] = None
    provenance: Provenance = Provenance.TRACKER
    audit: tuple[AuditEntry, ...] = field(default_factory=tuple)

    def __post_init__(self):
        rounds = [a.round for a in self.audit]
        if any(r2 <= r1 for r1, r2 in zip(rounds, rounds[1:])):
            raise InputError(f"sample {self.id!r}: audit rounds must be strictly increasing, got {rounds}")

    def relabel(self, new_label: Label, round: int) -> "LabeledSample":
        entry = AuditEntry(round, self.label, new_label)
        return replace(self, label=new_label, audit=self.audit + (entry,))


def check_unique_ids(samples: Iterable[LabeledSample]) -> None:
    seen: set[str] = set()
    for s in samples:
        if s.id in seen:
            raise InputError(f"duplicate sample id {s.id!r}")
        seen.add(s.id)


# --------------------------------------------------------------------------
# canonical dataset file: one JSON object per line


def sample_to_dict(s: LabeledSample) -> dict:
    return {
        "id": s.id,
        "text": s.text,
        "label": s.label.value,
        "annotator_label": s.annotator_label.value if s.annotator_label is not None else None,
        "provenance": s.provenance.value,
        "audit": [[a.round, a.old_label.value, a.new_label.value] for a in s.audit],
    }


def sample_from_dict(d: Mapping, label_type: LabelType = TargetLabel) -> LabeledSample:
    ann = d.get("annotator_label")
    return LabeledSample(
        id=str(d["id"]),
        text=d["text"],
        label=parse_label(d["label"], label_type),
        annotator_label=parse_label(ann, label_type) if ann not in (None, "") else None,
        provenance=Provenance(d.get("provenance", Provenance.TRACKER.value)),
        audit=tuple(
            AuditEntry(int(r), parse_label(o, label_type), parse_label(n, label_type))
            for r, o, n in d.get("audit", [])
        ),
    )


def dumps_dataset(samples: Sequence[LabeledSample]) -> str:
    return "".join(json.dumps(sample_to_dict(s), ensure_ascii=False) + "\n" for s in samples)


def write_dataset(samples: Sequence[LabeledSample], path: str | Path) -> Path:
    check_unique_ids(samples)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_dataset(samples), encoding="utf-8")
    return path


def read_dataset(path: str | Path, label_type: LabelType | None = None) -> list[LabeledSample]:
    rows = [json.loads(line) for line in Path(path).read_text(encoding="utf-8").split("\n") if line.strip()]
    if label_type is None:
        label_type = infer_label_type(r["label"] for r in rows)
    samples = [sample_from_dict(r, label_type) for r in rows]
    check_unique_ids(samples)
    return samples


# --------------------------------------------------------------------------
# delimited source files


def _delimiter_for(path: Path) -> str:
    return "\t" if path.suffix.lower() in {".tsv", ".tab"} else ","


def read_table(path: str | Path) -> list[dict]:
    """Rows of a CSV/TSV (by extension) or JSON-lines file as dicts."""
    path = Path(path)
    if path.suffix.lower() in {".jsonl", ".ndjson"}:
        return [json.loads(line) for line in path.read_text(encoding="utf-8").split("\n") if line.strip()]
    with path.open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh, delimiter=_delimiter_for(path)))


DEFAULT_CLAIM_COLUMNS = {
    "text": "text",
    "fine_label": "fine_label",
    "actor_type": "actor_type",
    "source_id": "source_id",
}


def read_claims(path: str | Path, column_map: Mapping[str, str] | None = None) -> list[RawClaim]:
    """Load a Tracker claim export; ``column_map`` maps field name -> column header."""
    cols = {**DEFAULT_CLAIM_COLUMNS, **(column_map or {})}
    claims = []
    for i, row in enumerate(read_table(path)):
        try:
            claims.append(
                RawClaim(
                    text=str(row[cols["text"]]),
                    fine_label=str(row[cols["fine_label"]]),
                    actor_type=str(row[cols["actor_type"]]).strip().lower(),
                    source_id=str(row.get(cols["source_id"]) or f"row{i}"),
                )
            )
        except KeyError as exc:
            raise InputError(f"{path}: row {i} lacks column {exc.args[0]!r}") from None
    return claims


def read_labeled_table(
    path: str | Path,
    text_col: str = "text",
    label_col: str = "label",
    id_col: str | None = "id",
    annotator_col: str | None = None,
    label_values: Mapping[str, str] | None = None,
    provenance_col: str | None = None,
    default_provenance: Provenance = Provenance.TRACKER,
) -> list[LabeledSample]:
    """Load an already-labelled table, e.g. a published release of the dataset.

    ``label_values`` maps raw cell values (such as ``"0"``) to label names.
    """
    values = {str(k): v for k, v in (label_values or {}).items()}

    def lab(raw):
        raw = str(raw).strip()
        return parse_label(values.get(raw, raw), TargetLabel)

    out = []
    for i, row in enumerate(read_table(path)):
        ann = row.get(annotator_col) if annotator_col else None
        prov = row.get(provenance_col) if provenance_col else None
        out.append(
            LabeledSample(
                id=str(row[id_col]) if id_col and row.get(id_col) not in (None, "") else f"s{i:05d}",
                text=str(row[text_col]),
                label=lab(row[label_col]),
                annotator_label=lab(ann) if ann not in (None, "") else None,
                provenance=Provenance(prov) if prov else default_provenance,
            )
        )
    check_unique_ids(out)
    return out
