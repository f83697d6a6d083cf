"""Quantitative ambition extraction: target years, baseline year, reduction percentage."""

from .evaluate import (
    OPTIMAL,
    RAW,
    AmbitionGold,
    EvalMode,
    EvalResult,
    ModeKind,
    accuracy_coverage_curve,
    bundled_fixture,
    by_dimension,
    confidence,
    evaluate_dimension,
    extract_all,
    plot_curves,
    read_curve,
    read_golds,
    read_texts,
    threshold_grid,
    write_curve,
)
from .matching import NUMBER_RE, NumericToken, answer_matches, numeric_tokens
from .qa import QAAnswer, QABackend, RuleBasedQA, TransformersQA, extract
from .questions import QUESTIONS, AmbitionDimension, question_for
