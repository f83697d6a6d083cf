"""Dataset ingestion: cleaning, label aggregation, statistics, agreement, splits."""

from .agreement import AgreementReport, compute_agreement
from .build import build_dataset, claims_to_samples, non_target_samples
from .cleaning import clean_samples, clean_text, filter_short, word_count
from .records import (
    AuditEntry,
    LabeledSample,
    Provenance,
    RawClaim,
    read_claims,
    read_dataset,
    read_labeled_table,
    read_table,
    write_dataset,
)
from .splits import stratified_kfold, stratified_subsample
from .stats import DatasetStats, dataset_stats
from .sublabels import aggregate_label, load_mapping

__all__ = [
    "AgreementReport",
    "AuditEntry",
    "DatasetStats",
    "LabeledSample",
    "Provenance",
    "RawClaim",
    "aggregate_label",
    "build_dataset",
    "claims_to_samples",
    "clean_samples",
    "clean_text",
    "compute_agreement",
    "dataset_stats",
    "filter_short",
    "load_mapping",
    "non_target_samples",
    "read_claims",
    "read_dataset",
    "read_labeled_table",
    "read_table",
    "stratified_kfold",
    "stratified_subsample",
    "word_count",
    "write_dataset",
]
