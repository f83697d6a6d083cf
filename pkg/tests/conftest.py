import os

# never let a test wait on hub retries
os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")

from pathlib import Path

import numpy as np
import pytest

from netzero.ingest import LabeledSample
from netzero.labels import TargetLabel

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_dataset():
    from netzero.synthetic import synthetic_dataset

    return synthetic_dataset({TargetLabel.NET_ZERO: 30, TargetLabel.REDUCTION: 30, TargetLabel.NONE: 45}, seed=7)


def make_samples(labels, prefix="s"):
    return [LabeledSample(f"{prefix}{i:04d}", f"text number {i} about things", lab) for i, lab in enumerate(labels)]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts = getattr(config, "_acceptance_verdicts", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(verdicts):
        ok, title, detail = verdicts[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} | {detail}")
