"""Transformers fine-tuning backend (torch)."""

from __future__ import annotations

import copy
import logging
import math
import random
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..errors import ModelNotFound
from .backends import Backend, ModelHandle, softmax
from .config import ClassifierConfig

logger = logging.getLogger(__name__)

_FALLBACK_MAX_LENGTH = 512


def _seed_everything(seed: int) -> None:
    import torch

    random.seed(seed)
    np.random.seed(seed % 2 ** 32)
    torch.manual_seed(seed)


def _load_pretrained(model_id: str, num_labels: int | None = None, id2label=None):
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    kwargs = {}
    if num_labels is not None:
        kwargs = dict(
            num_labels=num_labels,
            id2label=id2label,
            label2id={v: k for k, v in id2label.items()},
            ignore_mismatched_sizes=True,
        )
    try:
        tok = AutoTokenizer.from_pretrained(model_id)
        model = AutoModelForSequenceClassification.from_pretrained(model_id, **kwargs)
    except (OSError, ValueError, RuntimeError, EnvironmentError) as exc:
        raise ModelNotFound(f"cannot resolve base model {model_id!r}: {exc}") from exc
    return tok, model


def _max_length(tok, config: ClassifierConfig) -> int:
    limit = tok.model_max_length if tok.model_max_length and tok.model_max_length < 100_000 else _FALLBACK_MAX_LENGTH
    return min(limit, config.max_length) if config.max_length else limit


class TransformersModel(ModelHandle):
    backend_name = "transformers"

    def __init__(self, model, tokenizer, labels, config: ClassifierConfig, device: str = "cpu", batch_size: int = 32):
        self.model = model
        self.tokenizer = tokenizer
        self.labels = tuple(labels)
        self.config = config
        self.device = device
        self.batch_size = batch_size
        self.max_length = _max_length(tokenizer, config)

    def logits(self, texts: Sequence[str]) -> np.ndarray:
        import torch

        self.model.eval()
        out = []
        with torch.no_grad():
            for start in range(0, len(texts), self.batch_size):
                enc = self.tokenizer(
                    list(texts[start:start + self.batch_size]),
                    truncation=True,
                    max_length=self.max_length,
                    padding=True,
                    return_tensors="pt",
                ).to(self.device)
                out.append(self.model(**enc).logits.float().cpu().numpy())
        return np.concatenate(out).astype(np.float64) if out else np.zeros((0, len(self.labels)))

    def predict_proba(self, texts):
        return softmax(self.logits(texts)) if len(texts) else np.zeros((0, len(self.labels)))

    def _save_weights(self, path: Path) -> None:
        # HF writes its own config.json next to ours; file names do not clash
        self.model.save_pretrained(path)
        self.tokenizer.save_pretrained(path)

    @classmethod
    def load(cls, path: Path, config: ClassifierConfig, labels: tuple, device: str = "cpu") -> "TransformersModel":
        tok, model = _load_pretrained(str(path))
        return cls(model.to(device), tok, labels, config, device)


def load_pretrained_classifier(
    model_id: str,
    label_aliases: Mapping[str, object],
    device: str = "cpu",
    config: ClassifierConfig | None = None,
) -> TransformersModel:
    """Wrap an externally published classifier (e.g. a climate detector).

    ``label_aliases`` maps the checkpoint's ``id2label`` names, compared
    case-insensitively, to toolkit labels.
    """
    tok, model = _load_pretrained(model_id)
    aliases = {str(k).lower(): v for k, v in label_aliases.items()}
    id2label = model.config.id2label
    try:
        labels = tuple(aliases[str(id2label[i]).lower()] for i in range(len(id2label)))
    except KeyError as exc:
        raise ModelNotFound(f"{model_id}: no alias for checkpoint label {exc.args[0]!r}") from None
    cfg = config or ClassifierConfig(base_model_id=model_id, num_labels=len(labels))
    return TransformersModel(model.to(device), tok, labels, cfg, device)


class TransformersBackend(Backend):
    name = "transformers"

    def __init__(self, device: str | None = None, eval_batch_size: int = 64):
        self.device = device
        self.eval_batch_size = eval_batch_size
        self.history: list[dict] = []

    def train(self, train, val, config, labels):
        import torch
        from transformers import get_linear_schedule_with_warmup

        device = self.device or ("cuda" if torch.cuda.is_available() else "cpu")
        labels = tuple(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        _seed_everything(config.seed)
        tok, model = _load_pretrained(
            config.base_model_id, len(labels), {i: lab.value for i, lab in enumerate(labels)}
        )
        model.to(device)
        handle = TransformersModel(model, tok, labels, config, device, self.eval_batch_size)

        texts = [s.text for s in train]
        y = torch.tensor([index[s.label] for s in train], dtype=torch.long)
        n = len(texts)
        batches_per_epoch = math.ceil(n / config.batch_size)
        updates_per_epoch = math.ceil(batches_per_epoch / config.grad_accumulation)
        total = updates_per_epoch * config.epochs
        optim = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
        sched = get_linear_schedule_with_warmup(optim, math.ceil(total * config.warmup_ratio), total)
        gen = torch.Generator().manual_seed(config.seed)

        val_texts = [s.text for s in val]
        val_y = np.array([index[s.label] for s in val])
        best_acc, best_state, stale = -1.0, None, 0
        self.history = []
        for epoch in range(config.epochs):
            model.train()
            order = torch.randperm(n, generator=gen).tolist()
            optim.zero_grad()
            for b in range(batches_per_epoch):
                rows = order[b * config.batch_size:(b + 1) * config.batch_size]
                enc = tok(
                    [texts[i] for i in rows],
                    truncation=True,
                    max_length=handle.max_length,
                    padding=True,
                    return_tensors="pt",
                ).to(device)
                loss = model(**enc, labels=y[rows].to(device)).loss / config.grad_accumulation
                loss.backward()
                if (b + 1) % config.grad_accumulation == 0 or b + 1 == batches_per_epoch:
                    optim.step()
                    sched.step()
                    optim.zero_grad()
            if not val_texts:
                continue
            acc = float((handle.logits(val_texts).argmax(axis=1) == val_y).mean())
            self.history.append({"epoch": epoch + 1, "val_accuracy": acc})
            logger.info("epoch %d val_accuracy %.4f", epoch + 1, acc)
            if acc > best_acc:
                best_acc, stale = acc, 0
                best_state = copy.deepcopy({k: v.detach().cpu() for k, v in model.state_dict().items()})
            else:
                stale += 1
                if stale >= config.patience:
                    break
        if best_state is not None:
            model.load_state_dict(best_state)
        return handle
