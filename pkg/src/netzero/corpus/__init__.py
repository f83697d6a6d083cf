"""Two-stage classification of transcript corpora and yearly target-share indices."""

from .documents import Document, format_document, parse_document, parse_quarter, read_corpus, read_document, write_corpus
from .pipeline import (
    CorpusResult,
    EventShare,
    SentenceRecord,
    YearlyIndex,
    YearlyMode,
    analyze_corpus,
    classify_document,
    emit_timeseries,
    event_share,
    event_shares,
    plot_timeseries,
    read_timeseries,
    sample_for_handcheck,
    two_stage_classify,
    yearly_index,
)
from .sentences import ABBREVIATIONS, split_sentences
