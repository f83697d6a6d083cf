"""Accuracy of extracted ambitions against hand-labelled gold values."""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ..errors import InputError
from .matching import answer_matches
from .qa import QAAnswer, QABackend, extract
from .questions import AmbitionDimension

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AmbitionGold:
    sample_id: str
    dimension: AmbitionDimension
    gold_value: float

    def __post_init__(self):
        dim = AmbitionDimension(self.dimension)
        object.__setattr__(self, "dimension", dim)
        v = float(self.gold_value)
        if dim.is_year:
            if not (v.is_integer() and 1900 <= v <= 2200):
                raise InputError(f"{self.sample_id}: year gold {self.gold_value!r} outside [1900, 2200]")
            v = int(v)
        elif not (0 < v <= 100):
            raise InputError(f"{self.sample_id}: percentage gold {self.gold_value!r} outside (0, 100]")
        object.__setattr__(self, "gold_value", v)


class ModeKind(str, Enum):
    RAW = "RAW"
    OPTIMAL = "OPTIMAL"
    CONFIDENCE = "CONFIDENCE"


@dataclass(frozen=True)
class EvalMode:
    kind: ModeKind
    threshold: float | None = None

    def __post_init__(self):
        kind = ModeKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is ModeKind.CONFIDENCE:
            if self.threshold is None or not 0.0 <= float(self.threshold) <= 1.0:
                raise InputError(f"confidence threshold must be in [0, 1], got {self.threshold!r}")
            object.__setattr__(self, "threshold", float(self.threshold))
        elif self.threshold is not None:
            raise InputError(f"{kind.value} mode takes no threshold")

    def __str__(self) -> str:
        return f"CONFIDENCE({self.threshold:g})" if self.kind is ModeKind.CONFIDENCE else self.kind.value


RAW = EvalMode(ModeKind.RAW)
OPTIMAL = EvalMode(ModeKind.OPTIMAL)


def confidence(t: float) -> EvalMode:
    return EvalMode(ModeKind.CONFIDENCE, t)


@dataclass(frozen=True)
class EvalResult:
    mode: EvalMode
    accuracy: float
    coverage: float
    retained_ids: tuple[str, ...] = ()
    n_total: int = 0

    @property
    def n_retained(self) -> int:
        return len(self.retained_ids)


def _check_texts(golds: Sequence[AmbitionGold], texts: Mapping[str, str]) -> None:
    missing = sorted({g.sample_id for g in golds if g.sample_id not in texts})
    if missing:
        raise InputError(f"no text for {len(missing)} gold ids, e.g. {missing[:5]}")


def extract_all(
    golds: Sequence[AmbitionGold],
    texts: Mapping[str, str],
    qa_backend: QABackend,
    max_workers: int = 1,
) -> list[QAAnswer]:
    """One answer per gold record, in input order."""
    _check_texts(golds, texts)
    jobs = [(texts[g.sample_id], g.dimension) for g in golds]
    if max_workers <= 1:
        return [extract(qa_backend, t, d) for t, d in jobs]
    with ThreadPoolExecutor(max_workers) as pool:
        return list(pool.map(lambda job: extract(qa_backend, *job), jobs))


def _score(golds, texts, answers, mode: EvalMode) -> EvalResult:
    n = len(golds)
    keep = []
    for g, a in zip(golds, answers):
        if mode.kind is ModeKind.OPTIMAL and not answer_matches(texts[g.sample_id], g.gold_value, g.dimension):
            continue
        if mode.kind is ModeKind.CONFIDENCE and a.confidence < mode.threshold:
            continue
        keep.append((g, a))
    hits = sum(answer_matches(a.answer_text, g.gold_value, g.dimension) for g, a in keep)
    # nothing retained: accuracy is undefined
    acc = hits / len(keep) if keep else math.nan
    cov = len(keep) / n if n else 0.0
    return EvalResult(mode, acc, cov, tuple(g.sample_id for g, _ in keep), n)


def evaluate_dimension(
    golds: Sequence[AmbitionGold],
    texts: Mapping[str, str],
    qa_backend: QABackend,
    mode: EvalMode = RAW,
    max_workers: int = 1,
) -> EvalResult:
    golds = list(golds)
    if not isinstance(mode, EvalMode):
        raise InputError(f"invalid evaluation mode {mode!r}")
    answers = extract_all(golds, texts, qa_backend, max_workers)
    return _score(golds, texts, answers, mode)


def accuracy_coverage_curve(
    golds: Sequence[AmbitionGold],
    texts: Mapping[str, str],
    qa_backend: QABackend,
    thresholds: Sequence[float],
    max_workers: int = 1,
) -> list[EvalResult]:
    """Accuracy and retained fraction per confidence threshold; answers are computed once."""
    ts = [float(t) for t in thresholds]
    if any(not 0.0 <= t <= 1.0 for t in ts):
        raise InputError("thresholds must lie in [0, 1]")
    if any(b < a for a, b in zip(ts, ts[1:])):
        raise InputError("thresholds must be sorted ascending")
    golds = list(golds)
    answers = extract_all(golds, texts, qa_backend, max_workers)
    return [_score(golds, texts, answers, confidence(t)) for t in ts]


def threshold_grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive grid; 0..1 step 0.05 gives 21 points."""
    if step <= 0:
        raise InputError("step must be positive")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(n)]


# --------------------------------------------------------------------------
# files


def read_golds(path: str | Path) -> list[AmbitionGold]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                out.append(AmbitionGold(rec["sample_id"], AmbitionDimension.parse(rec["dimension"]), rec["gold_value"]))
            except (KeyError, ValueError, TypeError) as exc:
                raise InputError(f"{path}:{lineno}: bad gold record: {exc}") from exc
    return out


def read_texts(path: str | Path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                out[rec["sample_id"]] = rec["text"]
    return out


def bundled_fixture() -> tuple[list[AmbitionGold], dict[str, str]]:
    """The shipped hand-labelled ambition claims."""
    data = resources.files("netzero") / "data"
    with resources.as_file(data / "ambition_gold.jsonl") as g, resources.as_file(data / "ambition_texts.jsonl") as t:
        return read_golds(g), read_texts(t)


def by_dimension(golds: Iterable[AmbitionGold]) -> dict[AmbitionDimension, list[AmbitionGold]]:
    out: dict[AmbitionDimension, list[AmbitionGold]] = {d: [] for d in AmbitionDimension}
    for g in golds:
        out[g.dimension].append(g)
    return out


def write_curve(results: Sequence[EvalResult], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps({"threshold": r.mode.threshold, "accuracy": r.accuracy, "coverage": r.coverage}) + "\n")
    return path


def read_curve(path: str | Path) -> list[tuple[float, float, float]]:
    with open(path, encoding="utf-8") as fh:
        return [(r["threshold"], r["accuracy"], r["coverage"]) for r in map(json.loads, filter(str.strip, fh))]


def plot_curves(curves: Mapping[str, Sequence[EvalResult]], path: str | Path) -> Path:
    """Accuracy and remaining data fraction against threshold, one panel per dimension."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    n = len(curves)
    fig, axes = plt.subplots(1, n, figsize=(4 * n, 3.4), squeeze=False, sharey=True)
    for ax, (name, results) in zip(axes[0], curves.items()):
        ts = [r.mode.threshold for r in results]
        ax.plot(ts, [r.accuracy for r in results], marker="o", ms=3, label="accuracy")
        ax.plot(ts, [r.coverage for r in results], marker="s", ms=3, label="fraction of data")
        ax.set_title(name, fontsize=9)
        ax.set_xlabel("confidence threshold")
        ax.set_ylim(0, 1.02)
        ax.grid(alpha=0.3)
    axes[0][0].legend(fontsize=8, loc="lower left")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)
