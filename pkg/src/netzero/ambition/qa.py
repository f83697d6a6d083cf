"""Extractive question-answering backends.

``RuleBasedQA`` works offline: it reads the question to decide what kind of
number is wanted, scores every numeric candidate in the context from the
words around it, and reports the softmax mass of the winner (against a fixed
no-answer score) as its confidence. ``TransformersQA`` wraps a SQuAD-style
model through the transformers pipeline.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Protocol

from ..errors import ExtractionError
from .matching import NumericToken, numeric_tokens
from .questions import AmbitionDimension, question_for


@dataclass(frozen=True)
class QAAnswer:
    answer_text: str
    confidence: float
    start: int = 0
    end: int = 0


class QABackend(Protocol):
    name: str

    def answer(self, question: str, context: str) -> QAAnswer: ...


# --------------------------------------------------------------------------
# rule-based backend

_WORD_RE = re.compile(r"[a-z]+|\d+(?:[.,]\d+)*|%")

NZ_CUES = ("net zero", "net-zero", "netzero", "carbon neutral", "climate neutral", "climate-neutral",
           "neutrality", "zero carbon", "net negative", "carbon negative", "zero emissions", "ghg neutral",
           "greenhouse gas neutral")
REDUCTION_CUES = ("reduc", "cut", "lower", "decreas", "halve", "%", "percent", "per cent", "below")
TARGET_PREPS = {"by", "in", "until", "before", "through", "fy", "year", "of", "than"}
BASE_PREV = {"from", "compared", "relative", "against", "below", "versus", "vs", "since", "baseline", "base",
             "over", "on"}
BASE_NEXT = {"levels", "level", "baseline", "base", "footprint", "emissions", "figures", "values"}
PCT_NEXT = ("%", "percent", "per cent", "pct")

_INTENT_BASE, _INTENT_PCT, _INTENT_NZ, _INTENT_TARGET = "base", "pct", "nz", "target"


def _intent(question: str) -> str:
    q = question.lower()
    if "baseline" in q or "base year" in q:
        return _INTENT_BASE
    if "%" in q or "percent" in q:
        return _INTENT_PCT
    if "net zero" in q or "net-zero" in q or "neutral" in q:
        return _INTENT_NZ
    return _INTENT_TARGET


def _words(s: str) -> list[str]:
    return _WORD_RE.findall(s.lower())


def _is_year(tok: NumericToken) -> bool:
    return tok.is_plain_int and len(tok.text) == 4 and 1900 <= int(tok.text) <= 2200


def _followed_by_pct(context: str, tok: NumericToken) -> bool:
    tail = context[tok.end:tok.end + 9].lower().lstrip()
    return tail.startswith(PCT_NEXT)


def _cue_distance(text_before: str, cues) -> int | None:
    """Words between the last cue occurrence and the end of ``text_before``."""
    low = text_before.lower()
    best = None
    for cue in cues:
        i = low.rfind(cue)
        if i >= 0:
            d = len(_words(low[i + len(cue):]))
            best = d if best is None else min(best, d)
    return best


class RuleBasedQA:
    name = "rule-based"

    def __init__(self, null_score: float = 1.0, temperature: float = 1.0):
        self.null_score = null_score
        self.temperature = temperature

    def _candidates(self, intent: str, context: str) -> list[NumericToken]:
        toks = numeric_tokens(context)
        if intent == _INTENT_PCT:
            return [t for t in toks if not _is_year(t) or _followed_by_pct(context, t)]
        return [t for t in toks if _is_year(t)]

    def _score(self, intent: str, tok: NumericToken, rank: int, context: str) -> float:
        before = context[max(0, tok.start - 120):tok.start]
        prev = _words(before)[-3:]
        nxt = _words(context[tok.end:tok.end + 40])[:3]
        clause_before = re.split(r"[;:]|\band\b|,\s", before)[-1]
        score = -0.15 * rank

        has_base_prev = bool(set(prev) & BASE_PREV) or "compared" in before[-25:].lower()
        has_base_next = bool(set(nxt[:2]) & BASE_NEXT) or context[tok.end:tok.end + 20].lower().startswith(" as the base")
        has_target_prep = bool(prev) and prev[-1] in TARGET_PREPS

        if intent == _INTENT_PCT:
            if _followed_by_pct(context, tok):
                score += 3.0
            elif not any(c in clause_before.lower() for c in REDUCTION_CUES[:5]):
                score -= 3.0
            if _cue_distance(before, REDUCTION_CUES[:5]) is not None and _cue_distance(before, REDUCTION_CUES[:5]) <= 6:
                score += 1.5
            if prev and prev[-1] in {"scope", "and"} and not _followed_by_pct(context, tok):
                score -= 2.0
            return score

        if intent == _INTENT_BASE:
            if has_base_prev:
                score += 3.5
            if has_base_next:
                score += 3.0
            if has_target_prep and not has_base_prev:
                score -= 3.0
            return score

        # target-year intents
        if has_target_prep:
            score += 3.0
        if has_base_prev:
            score -= 4.0
        if has_base_next:
            score -= 4.0
        nz_d = _cue_distance(before, NZ_CUES)
        red_d = _cue_distance(before, REDUCTION_CUES)
        if intent == _INTENT_NZ:
            if nz_d is not None and nz_d <= 10:
                score += 3.0 - 0.1 * nz_d
                if _cue_distance(before, NZ_CUES[:3]) is not None and _cue_distance(before, NZ_CUES[:3]) <= 10:
                    score += 0.5
            elif red_d is not None and red_d <= 6:
                score -= 1.5
        else:
            if red_d is not None and red_d <= 10:
                score += 1.5
            if nz_d is not None and nz_d <= 6 and (red_d is None or nz_d < red_d):
                score -= 2.5
        if "interim" in clause_before.lower() and intent == _INTENT_NZ:
            score -= 1.0
        return score

    def _span(self, intent: str, tok: NumericToken, context: str) -> tuple[int, int]:
        start, end = tok.start, tok.end
        if intent != _INTENT_PCT:
            return start, end
        m = re.match(r"\s?(%|percent|per cent|pct)", context[end:], re.I)
        if m:
            end += m.end()
        # ranges such as "40 to 45 percent" or "50-52 percent"
        r = re.search(r"(\d+(?:\.\d+)?)\s*(?:-|–|to)\s*$", context[:start])
        if r:
            start = r.start(1)
        return start, end

    def answer(self, question: str, context: str) -> QAAnswer:
        intent = _intent(question)
        cands = self._candidates(intent, context)
        if not cands:
            # no numeric candidate: return the first word with zero confidence
            m = re.search(r"\S+", context)
            s, e = (m.start(), m.end()) if m else (0, 0)
            return QAAnswer(context[s:e], 0.0, s, e)
        scores = [self._score(intent, t, i, context) for i, t in enumerate(cands)]
        logits = [x / self.temperature for x in scores + [self.null_score]]
        top = max(logits)
        exp = [math.exp(x - top) for x in logits]
        z = sum(exp)
        best = max(range(len(cands)), key=lambda i: (scores[i], -i))
        s, e = self._span(intent, cands[best], context)
        return QAAnswer(context[s:e], exp[best] / z, s, e)


# --------------------------------------------------------------------------
# transformers backend

DEFAULT_QA_MODEL = "deepset/roberta-base-squad2"


class TransformersQA:
    name = "transformers"

    def __init__(self, model: str = DEFAULT_QA_MODEL, device: int | str = -1):
        from transformers import pipeline

        try:
            self._pipe = pipeline("question-answering", model=model, tokenizer=model, device=device)
        except (OSError, ValueError, RuntimeError) as exc:
            from ..errors import ModelNotFound

            raise ModelNotFound(f"cannot load QA model {model!r}: {exc}") from exc
        self.model = model

    def answer(self, question: str, context: str) -> QAAnswer:
        out = self._pipe(question=question, context=context)
        return QAAnswer(out["answer"], float(out["score"]), int(out["start"]), int(out["end"]))


# --------------------------------------------------------------------------


def extract(qa_backend: QABackend, text: str, dimension: AmbitionDimension) -> QAAnswer:
    """Ask the dimension's question; the answer is a span of ``text`` with confidence in [0, 1]."""
    if not text or not text.strip():
        raise ExtractionError("cannot extract from empty text")
    try:
        ans = qa_backend.answer(question_for(dimension), text)
    except ExtractionError:
        raise
    except Exception as exc:
        raise ExtractionError(f"QA backend {getattr(qa_backend, 'name', qa_backend)!r} failed: {exc}") from exc
    s, e = ans.start, ans.end
    if text[s:e] != ans.answer_text:
        # some backends strip whitespace from spans; fall back to a search
        s = text.find(ans.answer_text)
        if s < 0:
            raise ExtractionError(f"answer {ans.answer_text!r} is not a span of the input")
        e = s + len(ans.answer_text)
    conf = min(1.0, max(0.0, float(ans.confidence)))
    return QAAnswer(text[s:e], conf, s, e)
