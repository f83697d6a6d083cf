"""Offline backend: softmax regression over hashed word n-grams.

Needs no pretrained weights, so the whole pipeline (cross-validation, grid
search, corpus analysis) runs without network access. It shares the
transformer backend's schedule semantics: effective batch is
``batch_size * grad_accumulation``, linear warmup then linear decay, and
best-validation-accuracy checkpointing with early stopping.
"""

from __future__ import annotations

import math
import re
import zlib
from collections import Counter
from pathlib import Path
from typing import Sequence

import numpy as np

from .. import _kernels
from .backends import Backend, ModelHandle, softmax
from .config import ClassifierConfig

_TOKEN_RE = re.compile(r"\w+")


def _hash(token: str, n_features: int) -> int:
    return zlib.crc32(token.encode("utf-8")) % n_features


def featurize(texts: Sequence[str], n_features: int, ngram_max: int = 2):
    """CSR triplet (indptr, indices, data) of L2-normalised sublinear tf."""
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for text in texts:
        toks = _TOKEN_RE.findall(text.lower())
        grams = list(toks)
        for n in range(2, ngram_max + 1):
            grams.extend(" ".join(toks[i:i + n]) for i in range(len(toks) - n + 1))
        counts = Counter(_hash(g, n_features) for g in grams)
        cols = sorted(counts)
        vals = np.array([1.0 + math.log(counts[c]) for c in cols])
        norm = np.sqrt((vals * vals).sum())
        if norm > 0:
            vals /= norm
        indices.extend(cols)
        data.extend(vals.tolist())
        indptr.append(len(indices))
    return (
        np.asarray(indptr, dtype=np.int64),
        np.asarray(indices, dtype=np.int64),
        np.asarray(data, dtype=np.float64),
    )


def linear_schedule(total_steps: int, warmup_ratio: float, peak: float) -> np.ndarray:
    warmup = int(math.ceil(total_steps * warmup_ratio))
    steps = np.arange(total_steps, dtype=np.float64)
    up = (steps + 1) / max(1, warmup)
    down = (total_steps - steps) / max(1, total_steps - warmup)
    return peak * np.where(steps < warmup, up, down)


class HashedNgramModel(ModelHandle):
    backend_name = "hashed-ngram"

    def __init__(self, W, b, labels, config, n_features, ngram_max):
        self.W = W
        self.b = b
        self.labels = tuple(labels)
        self.config = config
        self.n_features = n_features
        self.ngram_max = ngram_max

    def logits(self, texts: Sequence[str]) -> np.ndarray:
        indptr, indices, data = featurize(texts, self.n_features, self.ngram_max)
        return _kernels.sparse_logits(indptr, indices, data, self.n_features, self.W, self.b)

    def predict_proba(self, texts):
        if len(texts) == 0:
            return np.zeros((0, len(self.labels)))
        return softmax(self.logits(texts))

    def _save_weights(self, path: Path) -> None:
        np.savez_compressed(
            path / "weights.npz", W=self.W, b=self.b, n_features=self.n_features, ngram_max=self.ngram_max
        )

    @classmethod
    def load(cls, path: Path, config: ClassifierConfig, labels: tuple) -> "HashedNgramModel":
        with np.load(path / "weights.npz") as z:
            return cls(z["W"], z["b"], labels, config, int(z["n_features"]), int(z["ngram_max"]))


class HashedNgramBackend(Backend):
    name = "hashed-ngram"

    def __init__(self, n_features: int = 2 ** 18, ngram_max: int = 2, step_size: float = 2.0):
        # ClassifierConfig.learning_rate is calibrated for transformers; this
        # backend uses its own peak step size.
        self.n_features = n_features
        self.ngram_max = ngram_max
        self.step_size = step_size
        self.history: list[dict] = []

    def train(self, train, val, config, labels):
        labels = tuple(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        indptr, indices, data = featurize([s.text for s in train], self.n_features, self.ngram_max)
        y = np.array([index[s.label] for s in train], dtype=np.int64)
        n = len(train)
        W = np.zeros((self.n_features, len(labels)))
        b = np.zeros(len(labels))
        eff_batch = config.batch_size * config.grad_accumulation
        per_epoch = math.ceil(n / eff_batch)
        lrs = linear_schedule(per_epoch * config.epochs, config.warmup_ratio, self.step_size)
        rng = np.random.default_rng(config.seed)

        model = HashedNgramModel(W, b, labels, config, self.n_features, self.ngram_max)
        val_texts = [s.text for s in val]
        val_y = np.array([index[s.label] for s in val], dtype=np.int64)
        best_acc, best = -1.0, (W.copy(), b.copy())
        stale = 0
        self.history = []
        for epoch in range(config.epochs):
            order = rng.permutation(n).astype(np.int64)
            _kernels.sgd_epoch(
                indptr, indices, data, self.n_features, y, order, eff_batch, W, b,
                lrs[epoch * per_epoch:(epoch + 1) * per_epoch],
            )
            if not len(val):
                best = (W.copy(), b.copy())
                continue
            acc = float((model.logits(val_texts).argmax(axis=1) == val_y).mean())
            self.history.append({"epoch": epoch + 1, "val_accuracy": acc})
            if acc > best_acc:
                best_acc, best, stale = acc, (W.copy(), b.copy()), 0
            else:
                stale += 1
                if stale >= config.patience:
                    break
        model.W, model.b = best
        return model
