from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Any, Mapping

from ..errors import ConfigError

DEFAULT_BASE_MODEL = "climatebert/distilroberta-base-climate-f"
AVERAGES = ("macro", "weighted", "micro")


@dataclass(frozen=True)
class ClassifierConfig:
    """Fine-tuning hyperparameters. Defaults are the five-fold CV base case."""

    base_model_id: str = DEFAULT_BASE_MODEL
    num_labels: int = 3
    epochs: int = 10
    batch_size: int = 32
    grad_accumulation: int = 2
    warmup_ratio: float = 0.1
    learning_rate: float = 5e-5
    patience: int = 5
    seed: int = 42
    max_length: int | None = None
    average: str = "macro"

    def __post_init__(self):
        bad = {}
        if self.num_labels not in (2, 3):
            bad["num_labels"] = "must be 2 or 3"
        if self.epochs < 1:
            bad["epochs"] = "must be >= 1"
        if self.batch_size < 1:
            bad["batch_size"] = "must be >= 1"
        if self.grad_accumulation < 1:
            bad["grad_accumulation"] = "must be >= 1"
        if not 0 <= self.warmup_ratio < 1:
            bad["warmup_ratio"] = "must be in [0, 1)"
        if not self.learning_rate > 0:
            bad["learning_rate"] = "must be > 0"
        if self.patience < 1:
            bad["patience"] = "must be >= 1"
        if self.max_length is not None and self.max_length < 1:
            bad["max_length"] = "must be >= 1"
        if self.average not in AVERAGES:
            bad["average"] = f"must be one of {AVERAGES}"
        if bad:
            raise ConfigError("invalid classifier config: " + ", ".join(f"{k} {v}" for k, v in bad.items()), bad)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "ClassifierConfig":
        """Build from loosely typed values (config file strings); unknown keys are errors."""
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(values) - set(known))
        if unknown:
            raise ConfigError(f"unknown classifier fields: {unknown}", {k: "unknown field" for k in unknown})
        kwargs: dict[str, Any] = {}
        bad = {}
        for key, raw in values.items():
            caster = _CASTS.get(key, str)
            try:
                kwargs[key] = caster(raw)
            except (TypeError, ValueError):
                bad[key] = f"cannot parse {raw!r}"
        if bad:
            raise ConfigError("invalid classifier config values", bad)
        return cls(**kwargs)


def _opt_int(v):
    return None if v in (None, "", "none", "None") else int(v)


_CASTS = {
    "num_labels": int,
    "epochs": int,
    "batch_size": int,
    "grad_accumulation": int,
    "warmup_ratio": float,
    "learning_rate": float,
    "patience": int,
    "seed": int,
    "max_length": _opt_int,
}
