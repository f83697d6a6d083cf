"""Mapping from fine-grained Tracker sub-labels to the two target classes."""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping

from ..errors import InputError, UnknownSubLabel
from ..labels import TargetLabel, parse_label

_SEP_RE = re.compile(r"[\s\-_]+")


def normalize_sub_label(value: str) -> str:
    return _SEP_RE.sub(" ", value.strip().casefold()).strip()


def parse_mapping(text: str) -> dict[str, TargetLabel]:
    mapping: dict[str, TargetLabel] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise InputError(f"mapping line {lineno}: expected 'sub_label<TAB>label', got {line!r}")
        label = parse_label(parts[1])
        if label is TargetLabel.NONE:
            raise InputError(f"mapping line {lineno}: tracker sub-labels cannot map to NONE")
        mapping[normalize_sub_label(parts[0])] = label
    return mapping


@lru_cache(maxsize=1)
def default_mapping() -> Mapping[str, TargetLabel]:
    text = resources.files("netzero").joinpath("data/sublabels.tsv").read_text(encoding="utf-8")
    return parse_mapping(text)


def load_mapping(path: str | Path | None = None) -> Mapping[str, TargetLabel]:
    if path is None:
        return default_mapping()
    return parse_mapping(Path(path).read_text(encoding="utf-8"))


def aggregate_label(fine_label: str, mapping: Mapping[str, TargetLabel] | None = None) -> TargetLabel:
    mapping = default_mapping() if mapping is None else mapping
    try:
        return mapping[normalize_sub_label(fine_label)]
    except KeyError:
        raise UnknownSubLabel(fine_label) from None
