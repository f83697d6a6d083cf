"""Transcript documents on disk.

One UTF-8 file per document::

    doc_id: ACME-2021Q1
    firm_id: ACME
    date: 2021-02-03
    quarter: 2021Q1

    <body text, any number of lines>

Header keys are lower-case, one ``key: value`` per line, in any order; the
first empty line ends the header. ``date`` is ISO-8601 and must fall in the
calendar ``quarter``. Files are read in sorted name order, ``*.txt`` only.
"""

from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from ..errors import InputError

HEADER_KEYS = ("doc_id", "firm_id", "date", "quarter")
_QUARTER_RE = re.compile(r"^(\d{4})\s*-?\s*Q([1-4])$", re.I)


def parse_quarter(value: str) -> tuple[int, int]:
    m = _QUARTER_RE.match(value.strip())
    if not m:
        raise InputError(f"bad quarter {value!r}; expected e.g. 2021Q3")
    return int(m.group(1)), int(m.group(2))


def quarter_of(date: dt.date) -> tuple[int, int]:
    return date.year, (date.month - 1) // 3 + 1


@dataclass(frozen=True)
class Document:
    doc_id: str
    firm_id: str
    event_date: dt.date
    quarter: tuple[int, int]
    body: str

    def __post_init__(self):
        if not self.body or not self.body.strip():
            raise InputError(f"document {self.doc_id!r} has an empty body")
        if quarter_of(self.event_date) != tuple(self.quarter):
            raise InputError(f"document {self.doc_id!r}: date {self.event_date} is not in quarter {self.quarter}")

    @property
    def year(self) -> int:
        return self.quarter[0]


def format_document(doc: Document) -> str:
    y, q = doc.quarter
    header = f"doc_id: {doc.doc_id}\nfirm_id: {doc.firm_id}\ndate: {doc.event_date.isoformat()}\nquarter: {y}Q{q}\n"
    return header + "\n" + doc.body.rstrip("\n") + "\n"


def parse_document(raw: str, source: str = "<string>") -> Document:
    head, sep, body = raw.partition("\n\n")
    if not sep:
        raise InputError(f"{source}: missing blank line after header")
    meta = {}
    for line in head.splitlines():
        key, colon, value = line.partition(":")
        if not colon:
            raise InputError(f"{source}: malformed header line {line!r}")
        meta[key.strip().lower()] = value.strip()
    missing = [k for k in HEADER_KEYS if k not in meta]
    if missing:
        raise InputError(f"{source}: header lacks {missing}")
    try:
        date = dt.date.fromisoformat(meta["date"])
    except ValueError as exc:
        raise InputError(f"{source}: {exc}") from exc
    return Document(meta["doc_id"], meta["firm_id"], date, parse_quarter(meta["quarter"]), body)


def read_document(path: str | Path) -> Document:
    path = Path(path)
    return parse_document(path.read_text(encoding="utf-8"), str(path))


def read_corpus(directory: str | Path) -> list[Document]:
    directory = Path(directory)
    if not directory.is_dir():
        raise InputError(f"corpus directory {directory} does not exist")
    docs = [read_document(p) for p in sorted(directory.glob("*.txt"))]
    seen: set[str] = set()
    for d in docs:
        if d.doc_id in seen:
            raise InputError(f"duplicate doc_id {d.doc_id!r} in {directory}")
        seen.add(d.doc_id)
    return docs


def write_corpus(docs: Iterable[Document], directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for d in docs:
        safe = re.sub(r"[^\w.-]", "_", d.doc_id)
        (directory / f"{safe}.txt").write_text(format_document(d), encoding="utf-8")
    return directory
