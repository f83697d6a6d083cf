import hashlib
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netzero.ambition import (
    OPTIMAL,
    QUESTIONS,
    RAW,
    AmbitionDimension,
    AmbitionGold,
    EvalMode,
    QAAnswer,
    RuleBasedQA,
    accuracy_coverage_curve,
    answer_matches,
    bundled_fixture,
    by_dimension,
    confidence,
    evaluate_dimension,
    extract,
    read_curve,
    threshold_grid,
    write_curve,
)
from netzero.errors import ExtractionError, InputError

D = AmbitionDimension
QA = RuleBasedQA()


def test_questions_verbatim_and_one_per_dimension():
    assert set(QUESTIONS) == set(D) and len(set(QUESTIONS.values())) == 4
    assert QUESTIONS[D.NZ_TARGET_YEAR] == "When does the organization want to achieve net zero?"
    assert QUESTIONS[D.RED_TARGET_YEAR] == "By which year does the organization want to reduce its emissions?"
    assert QUESTIONS[D.RED_BASE_YEAR] == (
        "What is the baseline year or level for the target to which the reduction target is compared to?"
    )
    assert QUESTIONS[D.RED_PERCENTAGE] == "What is the reduction target of the organization in %?"


def test_dimension_parse():
    assert D.parse("red-base-year") is D.RED_BASE_YEAR
    with pytest.raises(ValueError):
        D.parse("scope3")


# -- matching -----------------------------------------------------------------
# Claims are assembled from pieces whose numeric content is known up front, so
# the expected match set is constructed rather than parsed.

WORDS = "we aim to cut emissions by until from the group and scope compared level reach net zero tonnes".split()


def _number(rng):
    kind = rng.randrange(6)
    if kind == 0:
        y = rng.randrange(1990, 2071)
        return str(y), y, True
    if kind == 1:
        p = rng.randrange(1, 101)
        return f"{p}%", p, False
    if kind == 2:
        p = rng.randrange(1, 1000) / 10
        return f"{p} percent", p, False
    if kind == 3:
        v = rng.randrange(1000, 99999)
        return f"{v:,} tonnes", v, False
    if kind == 4:
        v = rng.randrange(1, 60)
        return f"({v})", v, False
    y = rng.randrange(1990, 2071)
    return f"{y}.5", y + 0.5, False


def _claim(rng):
    parts, nums = [], []
    for _ in range(rng.randrange(1, 5)):
        parts.extend(rng.choices(WORDS, k=rng.randrange(1, 4)))
        text, value, plain_year = _number(rng)
        parts.append(text)
        nums.append((value, plain_year))
    parts.extend(rng.choices(WORDS, k=rng.randrange(0, 3)))
    return " ".join(parts), nums


def _expected(nums, gold, dim):
    if dim.is_year:
        return any(plain and v == gold for v, plain in nums)
    return any(math.isclose(v, gold, abs_tol=1e-9) for v, _ in nums)


def test_answer_matches_against_constructed_claims():
    rng = random.Random(7)
    positives = 0
    for _ in range(1500):
        text, nums = _claim(rng)
        dim = rng.choice(list(D))
        if rng.random() < 0.5:
            gold = rng.choice(nums)[0]
        else:
            gold = rng.randrange(1990, 2071) if dim.is_year else rng.randrange(1, 101)
        if dim.is_year and not float(gold).is_integer():
            gold = int(gold)
        want = _expected(nums, gold, dim)
        positives += want
        assert answer_matches(text, gold, dim) == want, (text, gold, dim)
    assert 200 < positives < 1200


@pytest.mark.parametrize("text,gold,dim,ok", [
    ("27.5%", 27.5, D.RED_PERCENTAGE, True),
    ("30.0 percent", 30, D.RED_PERCENTAGE, True),
    ("by 2050", 2050, D.NZ_TARGET_YEAR, True),
    ("2,050 tonnes", 2050, D.NZ_TARGET_YEAR, False),
    ("12050", 2050, D.NZ_TARGET_YEAR, False),
    ("FY2030", 2030, D.RED_TARGET_YEAR, True),
    ("", 2030, D.RED_TARGET_YEAR, False),
    ("45", 4.5, D.RED_PERCENTAGE, False),
])
def test_answer_matches_examples(text, gold, dim, ok):
    assert answer_matches(text, gold, dim) is ok


def test_gold_validation():
    with pytest.raises(InputError):
        AmbitionGold("x", D.NZ_TARGET_YEAR, 2050.5)
    with pytest.raises(InputError):
        AmbitionGold("x", D.RED_BASE_YEAR, 1800)
    with pytest.raises(InputError):
        AmbitionGold("x", D.RED_PERCENTAGE, 0)
    assert AmbitionGold("x", "RED_PERCENTAGE", 100).gold_value == 100.0


# -- extraction -----------------------------------------------------------------

@given(st.text(min_size=1, max_size=200).filter(str.strip), st.sampled_from(list(D)))
@settings(max_examples=150, deadline=None)
def test_extracted_answer_is_substring(text, dim):
    a = extract(QA, text, dim)
    assert a.answer_text in text and 0.0 <= a.confidence <= 1.0
    assert text[a.start:a.end] == a.answer_text


def test_extract_examples():
    text = "We will cut scope 1 and 2 emissions by 42% by 2030 compared to 2019 and reach net zero by 2045."
    assert extract(QA, text, D.RED_PERCENTAGE).answer_text == "42%"
    assert extract(QA, text, D.RED_TARGET_YEAR).answer_text == "2030"
    assert extract(QA, text, D.RED_BASE_YEAR).answer_text == "2019"
    assert extract(QA, text, D.NZ_TARGET_YEAR).answer_text == "2045"
    assert extract(QA, "a 40 to 45 percent cut by 2030", D.RED_PERCENTAGE).answer_text == "40 to 45 percent"


class _Broken:
    def answer(self, question, context):
        raise RuntimeError("backend down")


class _Liar:
    def answer(self, question, context):
        return QAAnswer("text", 1.7, 0, 3)


def test_extract_errors():
    with pytest.raises(ExtractionError):
        extract(QA, "   ", D.NZ_TARGET_YEAR)
    with pytest.raises(ExtractionError):
        extract(_Broken(), "net zero by 2050", D.NZ_TARGET_YEAR)


def test_extract_clamps_and_relocates():
    a = extract(_Liar(), "the text", D.NZ_TARGET_YEAR)
    assert a.confidence == 1.0 and (a.start, a.end) == (4, 8)


def test_extract_rejects_non_span():
    class Inventor:
        def answer(self, question, context):
            return QAAnswer("2099", 0.9, 0, 4)

    with pytest.raises(ExtractionError):
        extract(Inventor(), "net zero by 2050", D.NZ_TARGET_YEAR)


# -- modes ------------------------------------------------------------------------

@pytest.fixture(scope="module")
def fixture_data():
    return bundled_fixture()


def test_bundled_fixture_is_frozen(fixture_data):
    from importlib import resources

    data = resources.files("netzero") / "data"
    digest = {n: hashlib.sha256((data / n).read_bytes()).hexdigest() for n in ("ambition_gold.jsonl", "ambition_texts.jsonl")}
    assert digest == {
        "ambition_gold.jsonl": "792077295e2c5f150cce381cefb672448776ce4caf994a55ab856183b9e34968",
        "ambition_texts.jsonl": "cd76c06361dd38677f3f9d51e7c32df4628b609471c1f6ddf997dee51a1ab410",
    }
    golds, texts = fixture_data
    assert len(golds) == 127 and all(g.sample_id in texts for g in golds)


def test_mode_relationships(fixture_data):
    golds, texts = fixture_data
    for dim, gs in by_dimension(golds).items():
        raw = evaluate_dimension(gs, texts, QA, RAW)
        zero = evaluate_dimension(gs, texts, QA, confidence(0.0))
        opt = evaluate_dimension(gs, texts, QA, OPTIMAL)
        assert raw.coverage == 1.0 and raw.n_total == len(gs)
        assert (zero.accuracy, zero.coverage) == (raw.accuracy, raw.coverage)
        assert set(opt.retained_ids) <= set(raw.retained_ids)
        assert 0 < opt.coverage <= 1 and opt.accuracy >= raw.accuracy
        assert raw.accuracy >= 0.9, dim


def test_optimal_drops_golds_absent_from_text():
    texts = {"a": "net zero by 2050", "b": "net zero, no year"}
    golds = [AmbitionGold("a", D.NZ_TARGET_YEAR, 2050), AmbitionGold("b", D.NZ_TARGET_YEAR, 2040)]
    res = evaluate_dimension(golds, texts, QA, OPTIMAL)
    assert res.retained_ids == ("a",) and res.coverage == 0.5 and res.accuracy == 1.0


def test_mode_validation():
    with pytest.raises(InputError):
        confidence(1.5)
    with pytest.raises(InputError):
        EvalMode("RAW", 0.3)
    with pytest.raises(InputError):
        evaluate_dimension([], {}, QA, "RAW")
    assert str(confidence(0.3)) == "CONFIDENCE(0.3)"


def test_missing_text_raises():
    with pytest.raises(InputError):
        evaluate_dimension([AmbitionGold("zz", D.NZ_TARGET_YEAR, 2050)], {}, QA)


# -- curve ------------------------------------------------------------------------

def test_threshold_grid():
    g = threshold_grid(0, 1, 0.05)
    assert len(g) == 21 and g[0] == 0.0 and g[-1] == 1.0


def test_curve_monotone_coverage_and_roundtrip(fixture_data, tmp_path):
    golds, texts = fixture_data
    grid = threshold_grid(0, 1, 0.05)
    for dim, gs in by_dimension(golds).items():
        curve = accuracy_coverage_curve(gs, texts, QA, grid)
        cov = [r.coverage for r in curve]
        assert all(b <= a for a, b in zip(cov, cov[1:]))
        assert curve[0].coverage == 1.0
        for r in curve:
            assert (r.coverage == 0) == math.isnan(r.accuracy)
        path = write_curve(curve, tmp_path / f"{dim.value}.jsonl")
        back = read_curve(path)
        assert len(back) == 21
        for (t, a, c), r in zip(back, curve):
            assert t == r.mode.threshold and c == r.coverage
            assert (math.isnan(a) and math.isnan(r.accuracy)) or a == r.accuracy


def test_curve_rejects_bad_thresholds(fixture_data):
    golds, texts = fixture_data
    with pytest.raises(InputError):
        accuracy_coverage_curve(golds, texts, QA, [0.5, 0.2])
    with pytest.raises(InputError):
        accuracy_coverage_curve(golds, texts, QA, [-0.1])


def test_parallel_extraction_matches_serial(fixture_data):
    golds, texts = fixture_data
    a = evaluate_dimension(golds, texts, QA, RAW, max_workers=1)
    b = evaluate_dimension(golds, texts, QA, RAW, max_workers=4)
    assert a == b
