"""Fine-tuning entry points, k-fold cross-validation and grid search."""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from ..errors import ConfigError
from ..ingest.records import LabeledSample
from ..ingest.splits import fold_assignment
from ..labels import BinaryLabel, TargetLabel, label_type_for
from .backends import Backend, ModelHandle, Prediction, resolve_backend
from .config import ClassifierConfig
from .metrics import METRIC_NAMES, FoldMetrics, metrics_from_confusion, confusion_matrix, summarize

logger = logging.getLogger(__name__)


def _labels_for(samples: Iterable[LabeledSample], config: ClassifierConfig) -> tuple:
    """Label tuple for the run; ConfigError when data and num_labels disagree."""
    types = {type(s.label) for s in samples}
    if len(types) > 1:
        raise ConfigError(f"mixed label vocabularies in data: {sorted(t.__name__ for t in types)}")
    if not types:
        return tuple(label_type_for(config.num_labels))
    (label_type,) = types
    if len(label_type) != config.num_labels or (config.num_labels == 3 and label_type is not TargetLabel):
        raise ConfigError(
            f"num_labels={config.num_labels} incompatible with {label_type.__name__} data",
            {"num_labels": f"data has {len(label_type)} labels"},
        )
    return tuple(label_type)


def fine_tune(
    train: Sequence[LabeledSample],
    val: Sequence[LabeledSample],
    config: ClassifierConfig,
    backend: Backend | None = None,
) -> ModelHandle:
    if not train:
        raise ConfigError("training set is empty")
    labels = _labels_for(list(train) + list(val), config)
    backend = backend or resolve_backend(config.base_model_id)
    logger.info("fine_tune: %s on %d train / %d val, backend=%s", config.base_model_id, len(train), len(val), backend.name)
    return backend.train(train, val, config, labels)


def predict(model: ModelHandle, texts: Sequence[str], batch_size: int = 64) -> list[Prediction]:
    return model.predict(list(texts), batch_size=batch_size)


# --------------------------------------------------------------------------
# cross-validation


@dataclass(frozen=True)
class SamplePrediction:
    sample_id: str
    text: str
    fold: int
    gold: object
    predicted: object
    probabilities: tuple[float, ...]


@dataclass
class CVReport:
    labels: tuple
    per_fold: list[FoldMetrics]
    mean: dict
    std: dict
    confusion: np.ndarray
    predictions: list[SamplePrediction] | None = None
    config: ClassifierConfig | None = None

    def to_dict(self) -> dict:
        return {
            "labels": [lab.value for lab in self.labels],
            "per_fold": [m.to_dict() for m in self.per_fold],
            "mean": self.mean,
            "std": self.std,
            "confusion": self.confusion.tolist(),
            "config": self.config.to_dict() if self.config else None,
        }

    def table(self) -> str:
        """Tab-separated per-fold metrics plus mean and std rows."""
        lines = ["fold\t" + "\t".join(METRIC_NAMES)]
        for i, m in enumerate(self.per_fold):
            lines.append(f"{i}\t" + "\t".join(f"{getattr(m, k):.4f}" for k in METRIC_NAMES))
        lines.append("mean\t" + "\t".join(f"{self.mean[k]:.4f}" for k in METRIC_NAMES))
        lines.append("std\t" + "\t".join(f"{self.std[k]:.4f}" for k in METRIC_NAMES))
        return "\n".join(lines) + "\n"

    def write(self, out_dir: str | Path) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "cv_report.json").write_text(json.dumps(self.to_dict(), indent=2) + "\n")
        (out / "cv_metrics.tsv").write_text(self.table())
        header = "gold\\pred\t" + "\t".join(lab.value for lab in self.labels)
        rows = [lab.value + "\t" + "\t".join(map(str, r)) for lab, r in zip(self.labels, self.confusion.tolist())]
        (out / "confusion.tsv").write_text("\n".join([header, *rows]) + "\n")
        if self.predictions is not None:
            with (out / "cv_predictions.jsonl").open("w", encoding="utf-8") as fh:
                for p in self.predictions:
                    fh.write(json.dumps({
                        "sample_id": p.sample_id,
                        "fold": p.fold,
                        "gold": p.gold.value,
                        "predicted": p.predicted.value,
                        "probabilities": list(p.probabilities),
                    }) + "\n")
        return out


def fold_seeds(master_seed: int, k: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(master_seed).spawn(k)]


def cross_validate(
    dataset: Sequence[LabeledSample],
    config: ClassifierConfig,
    k: int = 5,
    backend: Backend | None = None,
    keep_predictions: bool = True,
) -> CVReport:
    """Stratified k-fold CV; metrics per held-out fold, confusion pooled over folds."""
    labels = _labels_for(dataset, config)
    backend = backend or resolve_backend(config.base_model_id)
    folds = fold_assignment([s.label for s in dataset], k, config.seed)
    seeds = fold_seeds(config.seed, k)
    per_fold: list[FoldMetrics] = []
    pooled = np.zeros((len(labels), len(labels)), dtype=np.int64)
    records: list[SamplePrediction] = []
    for f in range(k):
        train = [s for s, g in zip(dataset, folds) if g != f]
        val = [s for s, g in zip(dataset, folds) if g == f]
        model = fine_tune(train, val, replace(config, seed=seeds[f]), backend)
        preds = model.predict([s.text for s in val])
        cm = confusion_matrix([s.label for s in val], [p.label for p in preds], labels)
        pooled += cm
        per_fold.append(metrics_from_confusion(cm, config.average))
        logger.info("fold %d/%d: %s", f + 1, k, per_fold[-1])
        if keep_predictions:
            records.extend(
                SamplePrediction(s.id, s.text, f, s.label, p.label, p.probabilities) for s, p in zip(val, preds)
            )
    mean, std = summarize(per_fold)
    return CVReport(labels, per_fold, mean, std, pooled, records if keep_predictions else None, config)


# --------------------------------------------------------------------------
# grid search

GRID_KEYS = ("learning_rate", "epochs", "batch_size")
# 3 x 2 x 2 = 12 cells per base model
DEFAULT_GRID = {"learning_rate": (3e-5, 5e-5, 7e-5), "epochs": (5, 10), "batch_size": (16, 32)}


@dataclass(frozen=True)
class GridRow:
    base_model_id: str
    learning_rate: float
    epochs: int
    batch_size: int
    mean: dict
    std: dict


@dataclass
class GridReport:
    rows: list[GridRow] = field(default_factory=list)

    def sorted(self, by: str = "accuracy", descending: bool = True) -> list[GridRow]:
        return sorted(self.rows, key=lambda r: r.mean[by], reverse=descending)

    def table(self) -> str:
        cols = ["base_model_id", *GRID_KEYS] + [f"{m}_{s}" for m in METRIC_NAMES for s in ("mean", "std")]
        lines = ["\t".join(cols)]
        for r in self.rows:
            vals = [r.base_model_id, f"{r.learning_rate:g}", str(r.epochs), str(r.batch_size)]
            vals += [f"{(r.mean if s == 'mean' else r.std)[m]:.4f}" for m in METRIC_NAMES for s in ("mean", "std")]
            lines.append("\t".join(vals))
        return "\n".join(lines) + "\n"


def grid_search(
    dataset: Sequence[LabeledSample],
    grid: Mapping[str, Sequence],
    bases: Sequence[str],
    base_config: ClassifierConfig | None = None,
    k: int = 5,
    backend_factory: Callable[[str], Backend] | None = None,
) -> GridReport:
    """One cross-validation per (base model, learning rate, epochs, batch size) cell."""
    unknown = set(grid) - set(GRID_KEYS)
    if unknown:
        raise ConfigError(f"unsupported grid keys {sorted(unknown)}")
    base_config = base_config or ClassifierConfig()
    axes = [list(grid.get(key, [getattr(base_config, key)])) for key in GRID_KEYS]
    if not bases or any(not a for a in axes):
        raise ConfigError("grid and bases must be non-empty")
    factory = backend_factory or resolve_backend
    report = GridReport()
    for base in bases:
        backend = factory(base)
        for lr, epochs, bs in itertools.product(*axes):
            cfg = replace(base_config, base_model_id=base, learning_rate=float(lr), epochs=int(epochs), batch_size=int(bs))
            cv = cross_validate(dataset, cfg, k=k, backend=backend, keep_predictions=False)
            report.rows.append(GridRow(base, float(lr), int(epochs), int(bs), cv.mean, cv.std))
            logger.info("grid %s lr=%g ep=%d bs=%d acc=%.4f", base, lr, epochs, bs, cv.mean["accuracy"])
    return report


# --------------------------------------------------------------------------

_BINARY = {TargetLabel.NET_ZERO: BinaryLabel.TARGET, TargetLabel.REDUCTION: BinaryLabel.TARGET, TargetLabel.NONE: BinaryLabel.NONE}


def binarize_label(label):
    return _BINARY[label]


def to_binary(dataset: Sequence[LabeledSample]) -> list[LabeledSample]:
    """Merge NET_ZERO and REDUCTION into TARGET; labels, annotator labels and audit entries alike."""
    out = []
    for s in dataset:
        out.append(
            replace(
                s,
                label=_BINARY[s.label],
                annotator_label=_BINARY[s.annotator_label] if s.annotator_label is not None else None,
                audit=tuple(replace(a, old_label=_BINARY[a.old_label], new_label=_BINARY[a.new_label]) for a in s.audit),
            )
        )
    return out
