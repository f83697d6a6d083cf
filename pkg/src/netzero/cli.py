"""Command-line entry point: ``netzero <command> [options]``.

Settings come from an INI-style config file (``--config``), overridden by
``NETZERO_<SECTION>_<KEY>`` environment variables, overridden in turn by
flags. Every command writes into a run directory, ``<outputs>/<UTC
timestamp>-<config hash>`` unless ``--run-dir`` is given. Failures print one
JSON object to stderr and exit nonzero (2 for usage and config errors).
"""

from __future__ import annotations

import argparse
import configparser
import datetime as dt
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import ConfigError, InputError, NetZeroError

logger = logging.getLogger("netzero")

SECTIONS: dict[str, dict[str, str]] = {
    "paths": {"dataset": "", "corpus": "", "models": "models", "outputs": "runs"},
    "classifier": {},
    "ambition": {"thresholds": "0:1:0.05", "backend": "rule", "qa_model": "deepset/roberta-base-squad2", "workers": "1"},
    "llm": {
        "endpoint": "https://api.openai.com/v1/chat/completions",
        "model": "gpt-3.5-turbo",
        "api_key_env": "OPENAI_API_KEY",
        "cache_dir": "",
        "max_in_flight": "4",
    },
    "corpus": {"climate_model": "", "target_model": "", "yearly_mode": "event", "workers": "1"},
}


class UsageError(ConfigError):
    pass


@dataclass
class RunConfig:
    paths: dict[str, str] = field(default_factory=lambda: dict(SECTIONS["paths"]))
    classifier: Any = None
    ambition: dict[str, str] = field(default_factory=lambda: dict(SECTIONS["ambition"]))
    llm: dict[str, str] = field(default_factory=lambda: dict(SECTIONS["llm"]))
    corpus: dict[str, str] = field(default_factory=lambda: dict(SECTIONS["corpus"]))

    def to_dict(self) -> dict:
        return {
            "paths": self.paths,
            "classifier": self.classifier.to_dict(),
            "ambition": self.ambition,
            "llm": self.llm,
            "corpus": self.corpus,
        }


def load_config(path: str | None, environ: dict | None = None) -> RunConfig:
    """Defaults, then the file, then ``NETZERO_<SECTION>_<KEY>`` variables."""
    from .classifier.config import ClassifierConfig

    environ = os.environ if environ is None else environ
    clf_keys = {f.name for f in fields(ClassifierConfig)}
    values = {s: dict(d) for s, d in SECTIONS.items()}
    bad: dict[str, str] = {}
    if path:
        if not Path(path).is_file():
            raise UsageError(f"config file {path} not found", {"config": "file not found"})
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        try:
            cp.read(path, encoding="utf-8")
        except configparser.Error as exc:
            raise UsageError(f"cannot parse {path}: {exc}", {"config": "parse error"}) from exc
        for section in cp.sections():
            if section not in values:
                bad[section] = "unknown section"
                continue
            allowed = clf_keys if section == "classifier" else set(values[section])
            for key, val in cp.items(section):
                if key not in allowed:
                    bad[f"{section}.{key}"] = "unknown key"
                else:
                    values[section][key] = val
    for section in values:
        allowed = clf_keys if section == "classifier" else set(values[section])
        for key in allowed:
            env_key = f"NETZERO_{section}_{key}".upper()
            if env_key in environ:
                values[section][key] = environ[env_key]
    if bad:
        raise UsageError("invalid config file", bad)
    clf = ClassifierConfig.from_mapping(values["classifier"])
    return RunConfig(values["paths"], clf, values["ambition"], values["llm"], values["corpus"])


def config_hash(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:10]


# --------------------------------------------------------------------------
# helpers


def _require(paths: dict[str, str | None]) -> None:
    """Validate every input path up front; field-level diagnostics on failure."""
    bad = {}
    for name, p in paths.items():
        if not p:
            bad[name] = "required"
        elif not Path(p).exists():
            bad[name] = f"{p} does not exist"
    if bad:
        raise UsageError("missing or invalid paths", bad)


def _write_json(path: Path, obj) -> Path:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path


def _dataset_path(args, cfg: RunConfig) -> str:
    return args.dataset or cfg.paths["dataset"]


def _label_values(spec: str | None) -> dict[str, str]:
    if not spec:
        return {}
    try:
        return dict(item.split("=", 1) for item in spec.split(","))
    except ValueError:
        raise UsageError("--label-values must look like 0=NONE,1=NET_ZERO", {"label_values": "malformed"}) from None


def parse_thresholds(spec: str) -> list[float]:
    """``start:stop:step`` (inclusive) or a comma list."""
    from .ambition import threshold_grid

    try:
        if ":" in spec:
            start, stop, step = (float(x) for x in spec.split(":"))
            return threshold_grid(start, stop, step)
        return [float(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad thresholds {spec!r}", {"thresholds": "expected start:stop:step or a comma list"}) from None


def _float_list(spec: str) -> list[float]:
    return [float(x) for x in spec.split(",")]


def _int_list(spec: str) -> list[int]:
    return [int(x) for x in spec.split(",")]


# --------------------------------------------------------------------------
# commands; each returns a JSON-serialisable summary


def cmd_ingest(args, cfg, run_dir: Path):
    from .ingest import build_dataset, dataset_stats, read_claims, read_labeled_table, read_table, write_dataset
    from .ingest.cleaning import clean_samples
    from .ingest.sublabels import load_mapping

    if args.labeled:
        _require({"labeled": args.labeled})
        raw = read_labeled_table(
            args.labeled, args.text_col, args.label_col, args.id_col or None, args.annotator_col or None,
            _label_values(args.label_values),
        )
        samples = clean_samples(raw, args.min_words)
    else:
        _require({"claims": args.claims, **{f"non_targets[{i}]": p for i, p in enumerate(args.non_targets)}})
        mapping = load_mapping(args.mapping) if args.mapping else None
        non_targets = []
        for p in args.non_targets:
            for i, row in enumerate(read_table(p)):
                non_targets.append((f"{Path(p).stem}-{row.get('source_id') or i}", row["text"]))
        samples = build_dataset(read_claims(args.claims), non_targets, mapping, args.min_words)
    out = Path(args.out) if args.out else run_dir / "dataset.jsonl"
    write_dataset(samples, out)
    stats = dataset_stats(samples).to_dict()
    _write_json(run_dir / "stats.json", stats)
    return {"dataset": str(out), "count": len(samples), "per_label_counts": stats["per_label_counts"]}


def cmd_stats(args, cfg, run_dir: Path):
    from .ingest import compute_agreement, dataset_stats, read_dataset

    path = _dataset_path(args, cfg)
    _require({"dataset": path})
    samples = read_dataset(path)
    out = {"stats": dataset_stats(samples).to_dict()}
    pairs = [(s.label, s.annotator_label) for s in samples if s.annotator_label is not None]
    if pairs:
        rep = compute_agreement([a for a, _ in pairs], [b for _, b in pairs])
        out["agreement"] = {"raw_agreement": rep.raw_agreement, "cohens_kappa": rep.cohens_kappa, "n": rep.n}
    _write_json(run_dir / "stats.json", out)
    return out


def cmd_split(args, cfg, run_dir: Path):
    from .ingest import read_dataset
    from .ingest.splits import fold_assignment

    path = _dataset_path(args, cfg)
    _require({"dataset": path})
    samples = read_dataset(path)
    seed = cfg.classifier.seed if args.seed is None else args.seed
    folds = fold_assignment([s.label for s in samples], args.k, seed)
    with (run_dir / "folds.tsv").open("w", encoding="utf-8") as fh:
        fh.write("sample_id\tfold\n")
        for s, f in zip(samples, folds):
            fh.write(f"{s.id}\t{int(f)}\n")
    labels = np.array([s.label.value for s in samples])
    counts = {
        lab.value: [int(((folds == f) & (labels == lab.value)).sum()) for f in range(args.k)]
        for lab in type(samples[0].label)
    }
    _write_json(run_dir / "fold_counts.json", counts)
    return {"k": args.k, "seed": seed, "fold_counts": counts}


def _classifier_config(args, cfg: RunConfig):
    overrides = {}
    for name in ("base_model_id", "epochs", "batch_size", "learning_rate", "seed", "num_labels"):
        v = getattr(args, name, None)
        if v is not None:
            overrides[name] = v
    if getattr(args, "binary", False):
        overrides["num_labels"] = 2
    return replace(cfg.classifier, **overrides)


def _training_data(args, cfg):
    from .ingest import read_dataset
    from .classifier import to_binary

    path = _dataset_path(args, cfg)
    _require({"dataset": path})
    samples = read_dataset(path)
    return to_binary(samples) if getattr(args, "binary", False) else samples


def cmd_train(args, cfg, run_dir: Path):
    from .classifier import fine_tune
    from .ingest.splits import fold_assignment

    samples = _training_data(args, cfg)
    clf = _classifier_config(args, cfg)
    if args.val_k:
        folds = fold_assignment([s.label for s in samples], args.val_k, clf.seed)
        train = [s for s, f in zip(samples, folds) if f != 0]
        val = [s for s, f in zip(samples, folds) if f == 0]
    else:
        train, val = samples, []
    model = fine_tune(train, val, clf)
    out = Path(args.out) if args.out else run_dir / "model"
    model.save(out)
    return {"model": str(out), "n_train": len(train), "n_val": len(val), "backend": model.backend_name}


def cmd_crossval(args, cfg, run_dir: Path):
    from .classifier import cross_validate

    samples = _training_data(args, cfg)
    report = cross_validate(samples, _classifier_config(args, cfg), k=args.k)
    report.write(run_dir)
    return {"mean": report.mean, "std": report.std}


def cmd_grid(args, cfg, run_dir: Path):
    from .classifier import grid_search
    from .ingest import stratified_subsample

    samples = _training_data(args, cfg)
    clf = _classifier_config(args, cfg)
    if args.subsample < 1.0:
        samples = stratified_subsample(samples, args.subsample, seed=clf.seed)
    grid = {"learning_rate": _float_list(args.lr), "epochs": _int_list(args.grid_epochs), "batch_size": _int_list(args.grid_batch_size)}
    bases = args.bases.split(",") if args.bases else [clf.base_model_id]
    report = grid_search(samples, grid, bases, clf, k=args.k)
    (run_dir / "grid.tsv").write_text(report.table(), encoding="utf-8")
    best = report.sorted()[0]
    return {"cells": len(report.rows), "n_samples": len(samples), "best": {"base": best.base_model_id, "lr": best.learning_rate, "epochs": best.epochs, "batch_size": best.batch_size, "accuracy": best.mean["accuracy"]}}


def cmd_eval_llm(args, cfg, run_dir: Path):
    from .ingest import read_dataset
    from .llm import CachedClient, HTTPChatClient, evaluate_zero_shot

    path = _dataset_path(args, cfg)
    cache_dir = args.cache_dir or cfg.llm["cache_dir"]
    _require({"dataset": path})
    samples = read_dataset(path)
    if args.limit:
        samples = samples[: args.limit]
    model = cfg.llm["model"]
    if args.replay_only:
        _require({"cache_dir": cache_dir})
        client = CachedClient(cache_dir, None, model=model)
    else:
        http = HTTPChatClient(cfg.llm["endpoint"], model, cfg.llm["api_key_env"])
        if not http.api_key:
            raise UsageError(f"no API key in ${cfg.llm['api_key_env']}; use --replay-only with a cache", {"api_key_env": "unset"})
        client = CachedClient(cache_dir, http, model=model) if cache_dir else http
    res = evaluate_zero_shot(samples, client, max_in_flight=int(cfg.llm["max_in_flight"]), average=cfg.classifier.average)
    _write_json(run_dir / "llm_report.json", res.to_dict())
    with (run_dir / "llm_verdicts.jsonl").open("w", encoding="utf-8") as fh:
        for s in samples:
            v = res.verdicts[s.id]
            fh.write(json.dumps({"sample_id": s.id, "gold": s.label.value, "parsed": v.parsed, "raw": v.raw_response, "error": v.error}) + "\n")
    return res.to_dict()


def _qa_backend(args, cfg):
    from .ambition import RuleBasedQA, TransformersQA

    name = args.backend or cfg.ambition["backend"]
    if name == "rule":
        return RuleBasedQA()
    if name == "transformers":
        return TransformersQA(args.qa_model or cfg.ambition["qa_model"])
    raise UsageError(f"unknown QA backend {name!r}", {"backend": "expected rule or transformers"})


def _ambition_inputs(args):
    from .ambition import bundled_fixture, read_golds, read_texts

    if args.golds or args.texts:
        _require({"golds": args.golds, "texts": args.texts})
        return read_golds(args.golds), read_texts(args.texts)
    return bundled_fixture()


def _dimensions(spec: str | None):
    from .ambition import AmbitionDimension

    if not spec or spec == "all":
        return list(AmbitionDimension)
    try:
        return [AmbitionDimension.parse(x) for x in spec.split(",")]
    except ValueError as exc:
        raise UsageError(str(exc), {"dimension": "unknown"}) from None


def _mode(spec: str):
    from .ambition import OPTIMAL, RAW, confidence

    s = spec.strip().lower()
    if s == "raw":
        return RAW
    if s == "optimal":
        return OPTIMAL
    if s.startswith("confidence"):
        try:
            return confidence(float(s.split(":", 1)[1] if ":" in s else s[s.index("(") + 1:s.rindex(")")]))
        except (ValueError, IndexError):
            pass
    raise UsageError(f"bad mode {spec!r}", {"mode": "expected raw, optimal or confidence:<t>"})


def cmd_ambition_eval(args, cfg, run_dir: Path):
    from .ambition import by_dimension, evaluate_dimension

    golds, texts = _ambition_inputs(args)
    qa = _qa_backend(args, cfg)
    modes = [_mode(m) for m in args.mode.split(",")]
    grouped = by_dimension(golds)
    rows = []
    for dim in _dimensions(args.dimension):
        for mode in modes:
            r = evaluate_dimension(grouped[dim], texts, qa, mode, max_workers=int(cfg.ambition["workers"]))
            rows.append({"dimension": dim.value, "mode": str(mode), "accuracy": r.accuracy, "coverage": r.coverage, "n": r.n_total})
    _write_json(run_dir / "ambition.json", rows)
    return rows


def cmd_curve(args, cfg, run_dir: Path):
    from .ambition import accuracy_coverage_curve, by_dimension, plot_curves, write_curve

    golds, texts = _ambition_inputs(args)
    qa = _qa_backend(args, cfg)
    ts = parse_thresholds(args.thresholds or cfg.ambition["thresholds"])
    grouped = by_dimension(golds)
    curves, written = {}, []
    for dim in _dimensions(args.dimension):
        curves[dim.value] = accuracy_coverage_curve(grouped[dim], texts, qa, ts, int(cfg.ambition["workers"]))
        written.append(str(write_curve(curves[dim.value], run_dir / f"curve_{dim.value.lower()}.jsonl")))
    if args.plot:
        written.append(str(plot_curves(curves, run_dir / "curves.png")))
    return {"points": len(ts), "files": written}


def _load_stage_model(spec: str, stage: str):
    from .classifier import load_model
    from .labels import ClimateLabel

    if spec.startswith("hf:"):
        from .classifier.hf import load_pretrained_classifier

        aliases = {"yes": ClimateLabel.CLIMATE, "no": ClimateLabel.NOT_CLIMATE,
                   "climate": ClimateLabel.CLIMATE, "not_climate": ClimateLabel.NOT_CLIMATE}
        return load_pretrained_classifier(spec[3:], aliases)
    _require({f"{stage}_model": spec})
    return load_model(spec)


def cmd_analyze_corpus(args, cfg, run_dir: Path):
    from .corpus import analyze_corpus, emit_timeseries, read_corpus

    corpus = args.corpus or cfg.paths["corpus"]
    climate = args.climate_model or cfg.corpus["climate_model"]
    target = args.target_model or cfg.corpus["target_model"]
    needed = {"corpus": corpus, "target_model": target}
    if not climate.startswith("hf:"):
        needed["climate_model"] = climate
    _require(needed)
    climate_model = _load_stage_model(climate, "climate")
    target_model = _load_stage_model(target, "target")
    docs = read_corpus(corpus)
    res = analyze_corpus(docs, climate_model, target_model, int(cfg.corpus["workers"]), args.yearly_mode or cfg.corpus["yearly_mode"])
    files = emit_timeseries(res.yearly, run_dir / "timeseries.csv", with_plot=args.plot)
    with (run_dir / "sentences.jsonl").open("w", encoding="utf-8") as fh:
        for r in res.records:
            fh.write(json.dumps({"doc_id": r.doc_id, "index": r.index, "text": r.text, "is_climate": r.is_climate, "target": r.target.value}) + "\n")
    with (run_dir / "events.csv").open("w", encoding="utf-8") as fh:
        fh.write("doc_id,year,quarter,share_net_zero,share_reduction,n_sentences\n")
        for s in res.shares:
            fh.write(f"{s.doc_id},{s.quarter[0]},{s.quarter[1]},{s.share_net_zero!r},{s.share_reduction!r},{s.n_sentences}\n")
    return {"documents": len(docs), "sentences": len(res.records), "files": [str(f) for f in files]}


def read_sentence_records(path: str | Path):
    from .corpus import SentenceRecord
    from .labels import TargetLabel

    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                r = json.loads(line)
                out.append(SentenceRecord(r["doc_id"], int(r["index"]), r["text"], bool(r["is_climate"]), TargetLabel(r["target"])))
    return out


def cmd_sample_handcheck(args, cfg, run_dir: Path):
    from .corpus import sample_for_handcheck
    from .hitl import write_review

    _require({"sentences": args.sentences})
    items = sample_for_handcheck(read_sentence_records(args.sentences), args.n_random, args.seed, not args.no_targets)
    out = write_review(items, Path(args.out) if args.out else run_dir / "handcheck.csv")
    return {"review_file": str(out), "rows": len(items)}


def cmd_hitl_export(args, cfg, run_dir: Path):
    from .classifier.training import CVReport, SamplePrediction
    from .hitl import collect_misclassifications, write_review
    from .ingest import read_dataset
    from .labels import infer_label_type, parse_label

    path = _dataset_path(args, cfg)
    preds_file = Path(args.cv_run) / "cv_predictions.jsonl"
    _require({"dataset": path, "cv_run": args.cv_run})
    if not preds_file.exists():
        from .errors import MissingPredictions

        raise MissingPredictions(f"{args.cv_run} has no cv_predictions.jsonl")
    texts = {s.id: s.text for s in read_dataset(path)}
    rows = [json.loads(line) for line in preds_file.read_text(encoding="utf-8").split("\n") if line.strip()]
    lt = infer_label_type([r["gold"] for r in rows] + [r["predicted"] for r in rows])
    missing = [r["sample_id"] for r in rows if r["sample_id"] not in texts]
    if missing:
        raise InputError(f"{len(missing)} predicted ids not in dataset, e.g. {missing[:3]}")
    preds = [
        SamplePrediction(r["sample_id"], texts[r["sample_id"]], int(r["fold"]), parse_label(r["gold"], lt),
                         parse_label(r["predicted"], lt), tuple(r["probabilities"]))
        for r in rows
    ]
    report = CVReport(tuple(lt), [], {}, {}, None, preds)
    items = collect_misclassifications(report, args.round)
    out = write_review(items, Path(args.out) if args.out else run_dir / f"review_round{args.round}.csv")
    return {"review_file": str(out), "items": len(items)}


def cmd_hitl_apply(args, cfg, run_dir: Path):
    from .hitl import apply_corrections, exclusions_from, read_exclusions, read_review, write_exclusions
    from .ingest import read_dataset, write_dataset

    path = _dataset_path(args, cfg)
    _require({"dataset": path, "review": args.review})
    samples = read_dataset(path)
    review = read_review(args.review, type(samples[0].label) if samples else None)
    updated = apply_corrections(samples, review)
    out = Path(args.out) if args.out else run_dir / "dataset.jsonl"
    write_dataset(updated, out)
    excl_path = Path(args.exclusions) if args.exclusions else run_dir / "exclusions.csv"
    exclusions = exclusions_from(review, read_exclusions(excl_path))
    write_exclusions(exclusions, excl_path)
    changed = sum(a != b for a, b in zip(samples, updated))
    return {"dataset": str(out), "changed": changed, "exclusions": len(exclusions)}


REPORT_ARTIFACTS = ("stats.json", "fold_counts.json", "cv_report.json", "grid.tsv", "llm_report.json", "ambition.json", "timeseries.csv")


def cmd_report(args, cfg, run_dir: Path):
    """Collect existing artifacts of earlier runs; computes nothing."""
    _require({f"runs[{i}]": r for i, r in enumerate(args.runs)})
    sections = []
    found = {}
    for r in args.runs:
        for name in REPORT_ARTIFACTS:
            p = Path(r) / name
            if p.exists():
                found.setdefault(str(r), []).append(name)
                sections.append(f"## {Path(r).name} / {name}\n\n```\n{p.read_text(encoding='utf-8').rstrip()}\n```\n")
    (run_dir / "report.md").write_text("# Run report\n\n" + "\n".join(sections), encoding="utf-8")
    return {"report": str(run_dir / "report.md"), "artifacts": found}


# --------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}", {"argv": message})


def _add_classifier_flags(p):
    p.add_argument("--base-model", dest="base_model_id")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--binary", action="store_true", help="merge NET_ZERO and REDUCTION into TARGET")


def build_parser() -> argparse.ArgumentParser:
    # global options are accepted before or after the command name
    common = _Parser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="INI config file")
    common.add_argument("--run-dir", default=argparse.SUPPRESS, help="output directory (default: <outputs>/<timestamp>-<hash>)")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    parser = _Parser(prog="netzero", description="Net zero and reduction target toolkit", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _orig = sub.add_parser
    sub.add_parser = lambda *a, **kw: _orig(*a, parents=[common], **kw)

    p = sub.add_parser("ingest", help="build the labelled dataset")
    p.add_argument("--claims", help="tracker claim export (csv/tsv/jsonl)")
    p.add_argument("--non-targets", nargs="*", default=[], help="tables with a text column")
    p.add_argument("--mapping", help="sub-label mapping TSV")
    p.add_argument("--labeled", help="already-labelled table instead of raw claims")
    p.add_argument("--text-col", default="text")
    p.add_argument("--label-col", default="label")
    p.add_argument("--id-col", default="id")
    p.add_argument("--annotator-col")
    p.add_argument("--label-values", help="raw=LABEL pairs, e.g. 0=NONE,1=NET_ZERO,2=REDUCTION")
    p.add_argument("--min-words", type=int, default=5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="length statistics and annotator agreement")
    p.add_argument("--dataset")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("split", help="stratified fold assignment")
    p.add_argument("--dataset")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="fine-tune one model")
    p.add_argument("--dataset")
    p.add_argument("--num-labels", type=int)
    p.add_argument("--val-k", type=int, default=5, help="hold out fold 0 of k for early stopping; 0 disables")
    p.add_argument("--out")
    _add_classifier_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("crossval", help="stratified k-fold cross-validation")
    p.add_argument("--dataset")
    p.add_argument("--k", type=int, default=5)
    _add_classifier_flags(p)
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("grid", help="hyperparameter grid of cross-validations")
    p.add_argument("--dataset")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--lr", default="3e-5,5e-5,7e-5")
    p.add_argument("--grid-epochs", default="5,10")
    p.add_argument("--grid-batch-size", default="16,32")
    p.add_argument("--bases", help="comma-separated base model ids")
    p.add_argument("--subsample", type=float, default=1.0, help="stratified fraction of the dataset")
    _add_classifier_flags(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("eval-llm", help="zero-shot chat-model baseline")
    p.add_argument("--dataset")
    p.add_argument("--cache-dir")
    p.add_argument("--replay-only", action="store_true", help="answer from the cache only")
    p.add_argument("--limit", type=int)
    p.set_defaults(func=cmd_eval_llm)

    for name, func, helptext in (("ambition-eval", cmd_ambition_eval, "ambition extraction accuracy"),
                                 ("curve", cmd_curve, "accuracy/coverage over confidence thresholds")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--golds")
        p.add_argument("--texts")
        p.add_argument("--dimension", default="all")
        p.add_argument("--backend", choices=("rule", "transformers"))
        p.add_argument("--qa-model")
        if name == "curve":
            p.add_argument("--thresholds")
            p.add_argument("--plot", action="store_true")
        else:
            p.add_argument("--mode", default="raw,optimal,confidence:0.3")
        p.set_defaults(func=func)

    p = sub.add_parser("analyze-corpus", help="two-stage labelling and yearly index")
    p.add_argument("--corpus")
    p.add_argument("--climate-model", help="saved model dir or hf:<model id>")
    p.add_argument("--target-model")
    p.add_argument("--yearly-mode", choices=("event", "quarter"))
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_analyze_corpus)

    p = sub.add_parser("sample-handcheck", help="review sample of corpus sentences")
    p.add_argument("--sentences", required=True, help="sentences.jsonl from analyze-corpus")
    p.add_argument("--n-random", type=int, default=237)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-targets", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample_handcheck)

    p = sub.add_parser("hitl-export", help="misclassifications of a cross-validation run")
    p.add_argument("--dataset")
    p.add_argument("--cv-run", required=True, help="crossval run directory")
    p.add_argument("--round", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_hitl_export)

    p = sub.add_parser("hitl-apply", help="apply a reviewed file to the dataset")
    p.add_argument("--dataset")
    p.add_argument("--review", required=True)
    p.add_argument("--exclusions", help="exclusions file to extend (default: in the run dir)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_hitl_apply)

    p = sub.add_parser("report", help="collect artifacts of earlier runs")
    p.add_argument("runs", nargs="+")
    p.set_defaults(func=cmd_report)
    return parser


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    args = build_parser().parse_args(argv)
    # suppressed globals are absent unless given; actions are shared with
    # the subparsers, so set_defaults would clobber them
    for key, default in (("config", None), ("run_dir", None), ("verbose", False)):
        if not hasattr(args, key):
            setattr(args, key, default)
    return args


def _run_dir(args, cfg: RunConfig) -> Path:
    if args.run_dir:
        path = Path(args.run_dir)
    else:
        payload = {"command": args.command, "config": cfg.to_dict(),
                   "args": {k: v for k, v in vars(args).items() if k not in ("func", "run_dir", "verbose")}}
        stamp = dt.datetime.now(dt.timezone.utc).strftime("%Y%m%dT%H%M%S")
        path = Path(cfg.paths["outputs"]) / f"{stamp}-{config_hash(payload)}"
    path.mkdir(parents=True, exist_ok=True)
    return path


def _fail(exc: BaseException, code: int) -> int:
    err = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ConfigError) and exc.fields:
        err["fields"] = exc.fields
    print(json.dumps(err, sort_keys=True), file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
        cfg = load_config(args.config)
        run_dir = _run_dir(args, cfg)
        _write_json(run_dir / "config.json", {"command": args.command, **cfg.to_dict()})
        summary = args.func(args, cfg, run_dir)
    except ConfigError as exc:
        return _fail(exc, 2)
    except (NetZeroError, OSError, ValueError, KeyError) as exc:
        return _fail(exc, 1)
    print(json.dumps({"run_dir": str(run_dir), "result": summary}, sort_keys=True, default=str))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
