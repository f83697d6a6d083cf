"""Sequence-classification backend interface, model handles and stub backends.

A backend turns (train, val, config) into a :class:`ModelHandle`; a handle
maps texts to probability vectors over its label tuple. Everything above this
layer (cross-validation, the corpus pipeline, HITL exports) only talks to
these two interfaces.
"""

from __future__ import annotations

import json
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from ..errors import ModelNotFound
from ..labels import BinaryLabel, ClimateLabel, LabelType, TargetLabel
from .config import ClassifierConfig

logger = logging.getLogger(__name__)

LABEL_TYPES: dict[str, LabelType] = {t.__name__: t for t in (TargetLabel, BinaryLabel, ClimateLabel)}


@dataclass(frozen=True)
class Prediction:
    label: Enum
    probabilities: tuple[float, ...]
    labels: tuple


def softmax(logits: np.ndarray) -> np.ndarray:
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def to_predictions(probs: np.ndarray, labels: Sequence) -> list[Prediction]:
    # np.argmax returns the first maximum, so ties go to the earlier label
    labels = tuple(labels)
    return [Prediction(labels[int(np.argmax(row))], tuple(float(p) for p in row), labels) for row in probs]


class ModelHandle(ABC):
    labels: tuple
    config: ClassifierConfig
    backend_name: str = "abstract"

    @abstractmethod
    def predict_proba(self, texts: Sequence[str]) -> np.ndarray:
        """(n_texts, n_labels) float64 array whose rows sum to one."""

    def predict(self, texts: Sequence[str], batch_size: int = 64) -> list[Prediction]:
        out: list[Prediction] = []
        for start in range(0, len(texts), batch_size):
            chunk = list(texts[start:start + batch_size])
            out.extend(to_predictions(self.predict_proba(chunk), self.labels))
        return out

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        write_metadata(path, self.backend_name, self.config, self.labels)
        self._save_weights(path)
        return path

    def _save_weights(self, path: Path) -> None:
        raise NotImplementedError(f"{type(self).__name__} cannot be saved")


class Backend(ABC):
    name: str = "abstract"

    @abstractmethod
    def train(
        self,
        train: Sequence,
        val: Sequence,
        config: ClassifierConfig,
        labels: tuple,
    ) -> ModelHandle:
        """Fit on ``train``; ``val`` drives checkpoint selection and early stopping."""


# --------------------------------------------------------------------------
# on-disk metadata shared by all saveable backends


def write_metadata(path: Path, backend: str, config: ClassifierConfig, labels: Sequence) -> None:
    labels = tuple(labels)
    (path / "run_config.json").write_text(
        json.dumps({"backend": backend, "config": config.to_dict()}, indent=2, sort_keys=True) + "\n"
    )
    (path / "label_map.json").write_text(
        json.dumps(
            {"label_type": type(labels[0]).__name__, "id2label": {str(i): lab.value for i, lab in enumerate(labels)}},
            indent=2,
        )
        + "\n"
    )


def read_metadata(path: Path) -> tuple[str, ClassifierConfig, tuple]:
    try:
        run = json.loads((path / "run_config.json").read_text())
        lm = json.loads((path / "label_map.json").read_text())
    except FileNotFoundError as exc:
        raise ModelNotFound(f"{path} is not a saved model directory ({exc.filename} missing)") from None
    label_type = LABEL_TYPES[lm["label_type"]]
    labels = tuple(label_type(lm["id2label"][str(i)]) for i in range(len(lm["id2label"])))
    return run["backend"], ClassifierConfig(**run["config"]), labels


def load_model(path: str | Path) -> ModelHandle:
    """Load any model saved with :meth:`ModelHandle.save`."""
    path = Path(path)
    backend, config, labels = read_metadata(path)
    if backend == "hashed-ngram":
        from .hashed import HashedNgramModel

        return HashedNgramModel.load(path, config, labels)
    if backend == "transformers":
        from .hf import TransformersModel

        return TransformersModel.load(path, config, labels)
    raise ModelNotFound(f"{path}: unknown backend {backend!r}")


def resolve_backend(base_model_id: str, **kwargs) -> Backend:
    """``hashed-ngram[:<log2 features>]`` selects the offline linear backend,
    anything else is treated as a transformers checkpoint id or path."""
    if base_model_id.startswith("hashed-ngram"):
        from .hashed import HashedNgramBackend

        _, _, bits = base_model_id.partition(":")
        if bits:
            kwargs.setdefault("n_features", 2 ** int(bits))
        return HashedNgramBackend(**kwargs)
    from .hf import TransformersBackend

    return TransformersBackend(**kwargs)


# --------------------------------------------------------------------------
# stubs


class LookupModel(ModelHandle):
    """Returns a one-hot distribution on a fixed text -> label table."""

    backend_name = "lookup"

    def __init__(self, table: Mapping[str, Enum], labels: tuple, config: ClassifierConfig, default: Optional[Enum] = None):
        self.table = dict(table)
        self.labels = tuple(labels)
        self.config = config
        self.default = default if default is not None else self.labels[-1]
        self.calls = 0

    def predict_proba(self, texts):
        self.calls += 1
        index = {lab: i for i, lab in enumerate(self.labels)}
        out = np.zeros((len(texts), len(self.labels)))
        for row, t in enumerate(texts):
            out[row, index[self.table.get(t, self.default)]] = 1.0
        return out


class GoldEchoBackend(Backend):
    """Harness oracle: every model it trains answers with the gold label.

    ``overrides`` (text -> label) injects deliberate mistakes.
    """

    name = "gold-echo"

    def __init__(self, dataset: Sequence, overrides: Mapping[str, Enum] | None = None):
        self.table = {s.text: s.label for s in dataset}
        self.table.update(overrides or {})
        self.trained = 0

    def train(self, train, val, config, labels):
        self.trained += 1
        return LookupModel(self.table, labels, config)
