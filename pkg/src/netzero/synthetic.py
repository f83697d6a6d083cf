"""Seeded synthetic text generators for tests, benchmarks and offline demos.

None of this data is meant to resemble the real tracker corpus statistically;
it only exercises the code paths with texts whose labels are known.
"""

from __future__ import annotations

import datetime as dt
from typing import Mapping, Sequence

import numpy as np

from .ingest.records import LabeledSample, Provenance
from .labels import ClimateLabel, TargetLabel

ACTORS = [
    "We", "The company", "Our group", "The city", "The region", "The government", "Our organization",
    "The council", "The bank", "Our business", "The municipality", "The state",
]
SCOPES = [
    "Scope 1 and 2 emissions", "greenhouse gas emissions", "operational emissions", "carbon emissions",
    "absolute GHG emissions", "Scope 1, 2 and 3 emissions", "emissions across our value chain",
]

NET_ZERO_TEMPLATES = [
    "{actor} commits to reach net zero {scope} by {year}.",
    "{actor} aims to become carbon neutral across all operations by {year}.",
    "{actor} has pledged to achieve net-zero emissions no later than {year}.",
    "By {year}, {actor_lc} will be climate neutral.",
    "{actor} is committed to net zero {scope} by {year}, in line with a 1.5°C pathway.",
    "{actor} targets zero carbon operations by {year} and will offset residual emissions.",
    "Our ambition is to be net negative by {year}, removing more carbon than we emit.",
]
REDUCTION_TEMPLATES = [
    "{actor} will reduce {scope} by {pct}% by {year} compared to {base} levels.",
    "{actor} aims to cut {scope} {pct}% by {year} from a {base} baseline.",
    "{actor} targets a {pct}% reduction in {scope} by {year} against {base}.",
    "Relative to {base}, {actor_lc} commits to lower {scope} by {pct} percent by {year}.",
    "{actor} set a target to decrease {scope} per unit of revenue by {pct}% by {year}, using {base} as the base year.",
]
CLIMATE_OTHER_TEMPLATES = [
    "Climate change poses physical risks to our facilities in coastal areas.",
    "{actor} reports {scope} annually following the GHG Protocol.",
    "Extreme weather events affected supply chains during the quarter.",
    "{actor} invested in renewable energy projects and energy efficiency upgrades.",
    "Carbon pricing could increase our operating costs over the coming decade.",
    "{actor} discloses climate-related risks in line with the TCFD recommendations.",
]
GENERIC_TEMPLATES = [
    "Revenue grew {pct}% in the quarter driven by strong demand.",
    "{actor} will reduce water consumption by {pct}% by {year}.",
    "Operating margins improved to {pct} percent compared to last year.",
    "{actor} opened {pct} new stores during fiscal {year}.",
    "We expect capital expenditures to remain flat in {year}.",
    "The board approved a dividend increase of {pct}% for shareholders.",
    "{actor} aims to cut waste to landfill by {pct}% by {year}.",
]


def _fill(template: str, rng: np.random.Generator) -> str:
    actor = ACTORS[rng.integers(len(ACTORS))]
    year = int(rng.integers(2025, 2061))
    return template.format(
        actor=actor,
        actor_lc=actor if actor == "We" else actor[0].lower() + actor[1:],
        scope=SCOPES[rng.integers(len(SCOPES))],
        year=year,
        base=int(rng.integers(1990, 2021)),
        pct=int(rng.integers(5, 96)),
    )


_TEMPLATES = {
    TargetLabel.NET_ZERO: NET_ZERO_TEMPLATES,
    TargetLabel.REDUCTION: REDUCTION_TEMPLATES,
}

TABLE1_COUNTS = {TargetLabel.NET_ZERO: 990, TargetLabel.REDUCTION: 1005, TargetLabel.NONE: 1522}


def target_sentence(label: TargetLabel, rng: np.random.Generator) -> str:
    if label is TargetLabel.NONE:
        pool = CLIMATE_OTHER_TEMPLATES if rng.random() < 0.5 else GENERIC_TEMPLATES
        return _fill(pool[rng.integers(len(pool))], rng)
    pool = _TEMPLATES[label]
    return _fill(pool[rng.integers(len(pool))], rng)


def synthetic_dataset(counts: Mapping[TargetLabel, int] | None = None, seed: int = 0) -> list[LabeledSample]:
    """Labelled three-class samples; default counts follow the published label distribution."""
    counts = TABLE1_COUNTS if counts is None else counts
    rng = np.random.default_rng(seed)
    out = []
    for label in TargetLabel:
        for i in range(counts.get(label, 0)):
            out.append(
                LabeledSample(
                    id=f"syn-{label.value.lower()}-{i:05d}",
                    text=target_sentence(label, rng),
                    label=label,
                    provenance=Provenance.NON_TARGET_SOURCE if label is TargetLabel.NONE else Provenance.TRACKER,
                )
            )
    order = rng.permutation(len(out))
    return [out[i] for i in order]


def synthetic_climate_dataset(n: int = 600, seed: int = 0) -> list[LabeledSample]:
    """Stage-1 training data: climate-related vs unrelated sentences."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        kind = rng.integers(4)
        if kind == 0:
            text, lab = target_sentence(TargetLabel.NET_ZERO, rng), ClimateLabel.CLIMATE
        elif kind == 1:
            text, lab = target_sentence(TargetLabel.REDUCTION, rng), ClimateLabel.CLIMATE
        elif kind == 2:
            text = _fill(CLIMATE_OTHER_TEMPLATES[rng.integers(len(CLIMATE_OTHER_TEMPLATES))], rng)
            lab = ClimateLabel.CLIMATE
        else:
            text = _fill(GENERIC_TEMPLATES[rng.integers(len(GENERIC_TEMPLATES))], rng)
            lab = ClimateLabel.NOT_CLIMATE
        out.append(LabeledSample(id=f"clim-{i:05d}", text=text, label=lab, provenance=Provenance.NON_TARGET_SOURCE))
    return out


CALL_FILLER = [
    "Thank you, operator, and good morning everyone.",
    "Let me hand over to our CFO for the financial review.",
    "We will now open the line for questions.",
    "Next question, please.",
    "That concludes our prepared remarks.",
    "Our guidance for the full year remains unchanged.",
]


def _corpus_sentence(year: int, trend_start: int, rng: np.random.Generator) -> str:
    p_nz = 0.01 + (0.03 * (year - trend_start + 1) if year >= trend_start else 0.0)
    u = rng.random()
    if u < p_nz:
        return target_sentence(TargetLabel.NET_ZERO, rng)
    if u < p_nz + 0.03:
        return target_sentence(TargetLabel.REDUCTION, rng)
    if u < p_nz + 0.13:
        return _fill(CLIMATE_OTHER_TEMPLATES[rng.integers(len(CLIMATE_OTHER_TEMPLATES))], rng)
    if u < p_nz + 0.5:
        return _fill(GENERIC_TEMPLATES[rng.integers(len(GENERIC_TEMPLATES))], rng)
    return CALL_FILLER[rng.integers(len(CALL_FILLER))]


def synthetic_corpus(
    n_docs: int = 30,
    years: Sequence[int] = tuple(range(2015, 2023)),
    seed: int = 0,
    sentences_per_doc: tuple[int, int] = (40, 90),
    trend_start: int = 2019,
):
    """Earnings-call-like documents whose net-zero share climbs from ``trend_start`` on."""
    from .corpus.documents import Document

    rng = np.random.default_rng(seed)
    firms = [f"FIRM{i:02d}" for i in range(max(1, n_docs // 3))]
    docs = []
    for i in range(n_docs):
        year = int(years[i % len(years)])
        q = int(rng.integers(1, 5))
        date = dt.date(year, 3 * q - 2, 1) + dt.timedelta(days=int(rng.integers(0, 88)))
        firm = firms[int(rng.integers(len(firms)))]
        n = int(rng.integers(sentences_per_doc[0], sentences_per_doc[1] + 1))
        body = " ".join(_corpus_sentence(year, trend_start, rng) for _ in range(n))
        docs.append(Document(f"{firm}-{year}Q{q}-{i:03d}", firm, date, (year, q), body))
    return docs
