import json

import numpy as np
import pytest

from netzero.classifier import (
    DEFAULT_GRID,
    ClassifierConfig,
    GoldEchoBackend,
    cross_validate,
    fine_tune,
    grid_search,
    load_model,
    predict,
    to_binary,
)
from netzero.classifier.backends import softmax, to_predictions
from netzero.classifier.hashed import HashedNgramBackend, featurize, linear_schedule
from netzero.classifier.training import fold_seeds
from netzero.errors import ConfigError
from netzero.labels import BinaryLabel, TargetLabel

HASHED = ClassifierConfig(base_model_id="hashed-ngram", epochs=15, batch_size=8, grad_accumulation=1)


def test_gold_echo_gives_perfect_scores(small_dataset):
    rep = cross_validate(small_dataset, ClassifierConfig(), k=5, backend=GoldEchoBackend(small_dataset))
    assert all(v == 1.0 for v in rep.mean.values())
    assert all(v == 0.0 for v in rep.std.values())
    assert np.count_nonzero(rep.confusion - np.diag(np.diag(rep.confusion))) == 0
    assert rep.confusion.sum() == len(small_dataset)


def test_injected_mistakes_show_up(small_dataset):
    wrong = [s for s in small_dataset if s.label is TargetLabel.NET_ZERO][:2]
    backend = GoldEchoBackend(small_dataset, {s.text: TargetLabel.NONE for s in wrong})
    rep = cross_validate(small_dataset, ClassifierConfig(), k=5, backend=backend)
    assert rep.confusion[0, 2] == 2
    bad = [p for p in rep.predictions if p.gold != p.predicted]
    assert sorted(p.sample_id for p in bad) == sorted(s.id for s in wrong)
    assert backend.trained == 5


def test_cv_report_files(tmp_path, small_dataset):
    rep = cross_validate(small_dataset, ClassifierConfig(), k=3, backend=GoldEchoBackend(small_dataset))
    rep.write(tmp_path)
    data = json.loads((tmp_path / "cv_report.json").read_text())
    assert data["labels"] == ["NET_ZERO", "REDUCTION", "NONE"] and len(data["per_fold"]) == 3
    assert (tmp_path / "cv_metrics.tsv").read_text().splitlines()[0] == "fold\taccuracy\tf1\tprecision\trecall"
    assert len((tmp_path / "cv_predictions.jsonl").read_text().splitlines()) == len(small_dataset)


def test_fold_seeds_are_distinct_and_stable():
    seeds = fold_seeds(42, 5)
    assert len(set(seeds)) == 5 and seeds == fold_seeds(42, 5)


def test_label_mismatch_is_a_config_error(small_dataset):
    with pytest.raises(ConfigError):
        fine_tune(small_dataset, [], ClassifierConfig(num_labels=2), GoldEchoBackend(small_dataset))
    with pytest.raises(ConfigError):
        fine_tune([], [], ClassifierConfig(), GoldEchoBackend(small_dataset))


def test_to_binary_maps_everything():
    from netzero.ingest import LabeledSample

    s = LabeledSample("a", "t", TargetLabel.NONE, annotator_label=TargetLabel.NET_ZERO).relabel(TargetLabel.REDUCTION, 1)
    (b,) = to_binary([s])
    assert (b.label, b.annotator_label) == (BinaryLabel.TARGET, BinaryLabel.TARGET)
    assert (b.audit[0].old_label, b.audit[0].new_label) == (BinaryLabel.NONE, BinaryLabel.TARGET)


def test_argmax_ties_go_to_first_label():
    (p,) = to_predictions(np.array([[0.4, 0.4, 0.2]]), tuple(TargetLabel))
    assert p.label is TargetLabel.NET_ZERO
    np.testing.assert_allclose(softmax(np.array([[1000.0, 1000.0]])), [[0.5, 0.5]])


def test_grid_has_one_row_per_cell(small_dataset):
    rep = grid_search(small_dataset, DEFAULT_GRID, ["stub"], ClassifierConfig(), k=3, backend_factory=lambda b: GoldEchoBackend(small_dataset))
    assert len(rep.rows) == 12
    assert len(rep.table().splitlines()) == 13
    with pytest.raises(ConfigError):
        grid_search(small_dataset, {"dropout": [0.1]}, ["stub"])


# --------------------------------------------------------------------------
# hashed n-gram backend


def test_featurize_rows_are_unit_norm():
    indptr, indices, data = featurize(["net zero by 2050", "", "cut cut cut emissions"], 1024)
    assert indptr.tolist()[:2] == [0, 7]
    for i in (0, 2):
        row = data[indptr[i]:indptr[i + 1]]
        assert np.sqrt((row ** 2).sum()) == pytest.approx(1.0)
    assert indptr[2] - indptr[1] == 0


def test_linear_schedule_shape():
    lrs = linear_schedule(10, 0.2, 1.0)
    assert lrs[:2].tolist() == [0.5, 1.0]
    assert lrs.max() == 1.0 and np.all(np.diff(lrs[1:]) <= 0) and lrs[-1] > 0


def test_hashed_backend_learns_and_roundtrips(tmp_path, small_dataset):
    train, val = small_dataset[:80], small_dataset[80:]
    model = fine_tune(train, val, HASHED, HashedNgramBackend(n_features=2 ** 14))
    acc = np.mean([p.label == s.label for p, s in zip(predict(model, [s.text for s in val]), val)])
    assert acc >= 0.9
    model.save(tmp_path / "m")
    again = load_model(tmp_path / "m")
    texts = [s.text for s in val]
    np.testing.assert_array_equal(again.predict_proba(texts), model.predict_proba(texts))
    assert again.labels == model.labels


def test_hashed_training_is_deterministic(small_dataset):
    a = fine_tune(small_dataset, [], HASHED, HashedNgramBackend(n_features=2 ** 12))
    b = fine_tune(small_dataset, [], HASHED, HashedNgramBackend(n_features=2 ** 12))
    np.testing.assert_array_equal(a.W, b.W)


def test_resolve_backend_parses_bits():
    from netzero.classifier import resolve_backend

    assert resolve_backend("hashed-ngram:12").n_features == 4096
    assert resolve_backend("some/transformer").name == "transformers"


def test_unknown_transformer_model_is_model_not_found(small_dataset):
    pytest.importorskip("transformers")
    from netzero.errors import ModelNotFound

    cfg = ClassifierConfig(base_model_id="/nonexistent/model/dir", epochs=1)
    with pytest.raises(ModelNotFound):
        fine_tune(small_dataset[:10], [], cfg)
