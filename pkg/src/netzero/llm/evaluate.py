"""Zero-shot evaluation of a chat model on the three-class task."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..classifier.metrics import FoldMetrics, metrics_from_predictions
from ..ingest.records import LabeledSample
from ..labels import TargetLabel
from .client import ChatClient, TransportError
from .prompt import UNPARSEABLE, LLMVerdict, build_prompt, parse_response

logger = logging.getLogger(__name__)


@dataclass
class ZeroShotResult:
    metrics: FoldMetrics
    confusion: np.ndarray
    verdicts: dict[str, LLMVerdict]
    n_unparseable: int

    def to_dict(self) -> dict:
        return {
            "metrics": self.metrics.to_dict(),
            "confusion": self.confusion.tolist(),
            "labels": [lab.value for lab in TargetLabel],
            "n_unparseable": self.n_unparseable,
        }


def query_with_retries(
    client: ChatClient,
    prompt: str,
    attempts: int = 3,
    base_delay: float = 1.0,
    sleep: Callable[[float], None] = time.sleep,
) -> LLMVerdict:
    """Call the client, backing off 1x, 2x, 4x... ``base_delay`` between attempts.

    Exhausted retries yield an UNPARSEABLE verdict carrying the last error.
    """
    err = None
    for attempt in range(attempts):
        try:
            return parse_response(client.complete(prompt))
        except TransportError as exc:
            err = exc
            logger.warning("chat call failed (attempt %d/%d): %s", attempt + 1, attempts, exc)
            if attempt + 1 < attempts:
                sleep(base_delay * 2 ** attempt)
    return LLMVerdict("", UNPARSEABLE, error=str(err))


def evaluate_zero_shot(
    dataset: Sequence[LabeledSample],
    client: ChatClient,
    max_in_flight: int = 4,
    attempts: int = 3,
    base_delay: float = 1.0,
    sleep: Callable[[float], None] = time.sleep,
    average: str = "macro",
) -> ZeroShotResult:
    def one(sample: LabeledSample) -> tuple[str, LLMVerdict]:
        return sample.id, query_with_retries(client, build_prompt(sample.text), attempts, base_delay, sleep)

    if max_in_flight > 1:
        with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
            verdicts = dict(pool.map(one, dataset))
    else:
        verdicts = dict(map(one, dataset))
    gold = [s.label for s in dataset]
    pred = [verdicts[s.id].parsed for s in dataset]
    metrics, cm = metrics_from_predictions(gold, pred, tuple(TargetLabel), average)
    n_bad = sum(1 for v in verdicts.values() if not v.ok)
    return ZeroShotResult(metrics, cm, verdicts, n_bad)
