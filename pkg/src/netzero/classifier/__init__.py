"""Target classifier: fine-tuning, cross-validation, grid search, binary variant."""

from .backends import (
    Backend,
    GoldEchoBackend,
    LookupModel,
    ModelHandle,
    Prediction,
    load_model,
    resolve_backend,
)
from .config import ClassifierConfig
from .metrics import FoldMetrics, confusion_matrix, metrics_from_confusion, metrics_from_predictions
from .training import (
    CVReport,
    DEFAULT_GRID,
    GridReport,
    SamplePrediction,
    cross_validate,
    fine_tune,
    grid_search,
    predict,
    to_binary,
)

__all__ = [
    "Backend",
    "CVReport",
    "ClassifierConfig",
    "FoldMetrics",
    "GoldEchoBackend",
    "GridReport",
    "LookupModel",
    "ModelHandle",
    "Prediction",
    "SamplePrediction",
    "confusion_matrix",
    "cross_validate",
    "fine_tune",
    "DEFAULT_GRID",
    "grid_search",
    "load_model",
    "metrics_from_confusion",
    "metrics_from_predictions",
    "predict",
    "resolve_backend",
    "to_binary",
]
