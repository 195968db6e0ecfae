"""End-to-end pipeline: configuration, enrollment, classification, training
and corpus evaluation.

A registry directory holds one enrolled manifest: per-class keypoint
feature caches, legacy descriptor vectors and keyword metadata. Batch
operations run a thread pool over samples; features extracted from a
sample are cached in-process so several strategies can share one run.
"""

from __future__ import annotations

import csv
import json
import os
import threading
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import calibration, evaluation, fusion, keypoints, legacy, textmatch
from .errors import (
    DegenerateDistribution,
    DuplicateClassId,
    InsufficientData,
    IoError,
    KeywordSubsetWarning,
    MissingCalibration,
    SchemaError,
    SingleClassInput,
)
from .imaging import Image, crop as crop_image, load_image, resize, to_grayscale

REGISTRY_SCHEMA = 1
STRATEGIES = ("fusion", "sift", "ocr", "hog_sp3", "fuzzy_color")
FUSION_RULES = ("mean", "min")
PROVIDER_KINDS = ("fixture", "remote")


@dataclass(frozen=True)
class PipelineConfig:
    """All tunables of the classification pipeline (validated at load)."""

    resize_width: int = 425
    resize_height: int = 270
    legacy_width: int = 424          # divisible by the HOG cell size
    legacy_height: int = 272
    match_ratio: float = 0.75
    top_k: int = 3
    fusion_rule: str = "mean"
    review_threshold: float = 0.5
    strategy: str = "fusion"
    color_weight: float = 1.0
    workers: int = 4
    provider_kind: str = "fixture"
    provider_path: Optional[str] = None
    provider_url: Optional[str] = None
    provider_credentials_env: str = "DOCID_OCR_TOKEN"
    provider_timeout: float = 10.0
    provider_concurrency: int = 4

    def __post_init__(self):
        if self.resize_width < 16 or self.resize_height < 16:
            raise SchemaError("resize target must be at least 16x16")
        if not (0.0 < self.match_ratio < 1.0):
            raise SchemaError("match_ratio must be in (0, 1)")
        if self.top_k < 1:
            raise SchemaError("top_k must be >= 1")
        if self.fusion_rule not in FUSION_RULES:
            raise SchemaError(f"fusion_rule must be one of {FUSION_RULES}")
        if not (0.0 <= self.review_threshold <= 1.0):
            raise SchemaError("review_threshold must be in [0, 1]")
        if self.strategy not in STRATEGIES:
            raise SchemaError(f"strategy must be one of {STRATEGIES}")
        if self.workers < 1 or self.provider_concurrency < 1:
            raise SchemaError("worker counts must be >= 1")
        if self.provider_kind not in PROVIDER_KINDS:
            raise SchemaError(f"provider_kind must be one of {PROVIDER_KINDS}")


def load_config(path=None, **overrides) -> PipelineConfig:
    """Config from a JSON file (or defaults), with keyword overrides."""
    doc = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except FileNotFoundError as exc:
            raise IoError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise SchemaError(f"config file is not valid JSON: {path}") from exc
    doc.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(doc) - known
    if unknown:
        raise SchemaError(f"unknown config keys: {sorted(unknown)}")
    return PipelineConfig(**doc)


class ThrottledProvider:
    """Caps concurrent provider calls (external engines rate-limit)."""

    def __init__(self, inner, limit: int):
        self._inner = inner
        self._sem = threading.Semaphore(limit)
        self.provider_id = inner.provider_id

    def extract(self, img):
        with self._sem:
            return self._inner.extract(img)


def make_provider(config: PipelineConfig, corpus_dir=None):
    """Text provider instance per config; fixture path may default to the corpus."""
    if config.provider_kind == "remote":
        if not config.provider_url:
            raise SchemaError("remote provider needs provider_url")
        remote = textmatch.RemoteTextProvider(
            config.provider_url, timeout=config.provider_timeout,
            credentials_env=config.provider_credentials_env)
        return ThrottledProvider(remote, config.provider_concurrency)
    path = config.provider_path
    if path is None and corpus_dir is not None:
        candidate = Path(corpus_dir) / "ocr_fixture.json"
        if candidate.exists():
            path = candidate
    if path is None:
        return textmatch.FixtureTextProvider({})
    try:
        return textmatch.FixtureTextProvider(path=path)
    except FileNotFoundError as exc:
        raise IoError(f"fixture file not found: {path}") from exc


# -- manifest and registry -------------------------------------------------------


@dataclass(frozen=True)
class RegistryClass:
    class_id: int
    name: str
    source: str
    features: keypoints.FeatureSet
    legacy_vectors: dict         # hog, sp3_centroid, sp3_fuzzy
    meta: textmatch.KeywordMetadata


@dataclass(frozen=True)
class Registry:
    classes: tuple

    @property
    def class_ids(self) -> list:
        return [c.class_id for c in self.classes]

    @property
    def feature_sets(self) -> list:
        return [c.features for c in self.classes]

    @property
    def metas(self) -> list:
        return [c.meta for c in self.classes]


def _load_manifest(path) -> list:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise IoError(f"manifest not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"manifest is not valid JSON: {path}") from exc
    base = Path(path).parent
    shared_meta = None
    if "metadata_file" in doc:
        metas = textmatch.load_metadata(base / doc["metadata_file"])
        shared_meta = {m.class_id: m for m in metas}
    entries = []
    seen = set()
    for cls in doc.get("classes", []):
        try:
            cid = int(cls["id"])
            name = str(cls.get("name", f"class_{cid}"))
            source = base / cls["source"]
        except KeyError as exc:
            raise SchemaError(f"manifest class missing field {exc}") from exc
        if cid in seen:
            raise DuplicateClassId(f"class id {cid} declared twice")
        seen.add(cid)
        if "keywords" in cls:
            words = [k["word"] for k in cls["keywords"]]
            tiers = [k.get("tier", textmatch.TIER_UNIQUE) for k in cls["keywords"]]
            meta = textmatch.KeywordMetadata(cid, tuple(words), tuple(tiers))
        elif shared_meta is not None and cid in shared_meta:
            meta = shared_meta[cid]
        else:
            raise SchemaError(f"class {cid}: no keyword metadata")
        crop_box = cls.get("crop")
        entries.append({"id": cid, "name": name, "source": source,
                        "crop": crop_box, "meta": meta})
    if not entries:
        raise SchemaError(f"manifest has no classes: {path}")
    return entries


def lint_keyword_subsets(metas) -> list:
    """Warn when one class's keywords subsume another's (text can't separate)."""
    findings = []
    for a in metas:
        for b in metas:
            if a.class_id != b.class_id and a.keyword_set <= b.keyword_set:
                findings.append((a.class_id, b.class_id))
                warnings.warn(
                    f"class {a.class_id} keywords are a subset of class "
                    f"{b.class_id}; text matching cannot separate them",
                    KeywordSubsetWarning, stacklevel=3)
    return findings


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _legacy_vectors(img: Image, config: PipelineConfig) -> dict:
    small = resize(img, config.legacy_width, config.legacy_height)
    hog = legacy.compute_hog(to_grayscale(small))
    sp3_centroid = legacy.sp3(small, legacy.CentroidNamer())
    sp3_fuzzy = legacy.sp3(small, legacy.FuzzyNamer())
    return {"hog": hog, "sp3_centroid": sp3_centroid, "sp3_fuzzy": sp3_fuzzy}


def enroll(manifest_path, registry_dir, config: Optional[PipelineConfig] = None) -> dict:
    """Extract and cache per-class features; write the registry files.

    Returns a summary dict. Emits KeywordSubsetWarning when one class's
    keyword set subsumes another's; enrollment proceeds.
    """
    config = config or PipelineConfig()
    entries = _load_manifest(manifest_path)
    lint_keyword_subsets([e["meta"] for e in entries])

    registry_dir = Path(registry_dir)
    registry_dir.mkdir(parents=True, exist_ok=True)
    index = {"schema_version": REGISTRY_SCHEMA, "config": config.__dict__,
             "classes": []}
    for e in entries:
        img = load_image(e["source"])
        if e["crop"]:
            x, y, w, h = (int(v) for v in e["crop"])
            img = crop_image(img, x, y, w, h)
        working = resize(img, config.resize_width, config.resize_height)
        fs = keypoints.extract_features(working, source_class=e["id"])
        feat_name = f"class_{e['id']:02d}_features.npz"
        keypoints.save_features(fs, registry_dir / feat_name)
        vectors = _legacy_vectors(img, config)
        legacy_name = f"class_{e['id']:02d}_legacy.npz"
        np.savez(registry_dir / legacy_name, **vectors)
        index["classes"].append({
            "id": e["id"],
            "name": e["name"],
            "source": str(e["source"]),
            "features": feat_name,
            "legacy": legacy_name,
            "keywords": [{"word": w, "tier": t}
                         for w, t in zip(e["meta"].keywords, e["meta"].tiers)],
        })
    _atomic_write(registry_dir / "registry.json",
                  json.dumps(index, indent=1, sort_keys=True) + "\n")
    return {"classes": len(entries), "registry": str(registry_dir)}


def load_registry(registry_dir) -> Registry:
    registry_dir = Path(registry_dir)
    index_path = registry_dir / "registry.json"
    try:
        with open(index_path, "r", encoding="utf-8") as fh:
            index = json.load(fh)
    except FileNotFoundError as exc:
        raise IoError(f"no registry at {registry_dir}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"registry index is not valid JSON: {index_path}") from exc
    if index.get("schema_version") != REGISTRY_SCHEMA:
        raise SchemaError(f"unsupported registry schema in {index_path}")
    classes = []
    for cls in index["classes"]:
        fs = keypoints.load_features(registry_dir / cls["features"])
        with np.load(registry_dir / cls["legacy"]) as data:
            vectors = {k: data[k] for k in data.files}
        meta = textmatch.KeywordMetadata(
            int(cls["id"]),
            tuple(k["word"] for k in cls["keywords"]),
            tuple(k["tier"] for k in cls["keywords"]))
        classes.append(RegistryClass(int(cls["id"]), cls["name"], cls["source"],
                                     fs, vectors, meta))
    if not classes:
        raise SchemaError(f"registry has no classes: {index_path}")
    return Registry(tuple(classes))


# -- classification ----------------------------------------------------------------

_feature_cache: dict = {}
_cache_lock = threading.Lock()


def clear_feature_cache() -> None:
    with _cache_lock:
        _feature_cache.clear()


def _sample_features(path, img: Image) -> keypoints.FeatureSet:
    key = str(path)
    with _cache_lock:
        fs = _feature_cache.get(key)
    if fs is None:
        fs = keypoints.extract_features(img)
        with _cache_lock:
            _feature_cache[key] = fs
    return fs


def _visual_outcome(sample_path, working: Image, registry: Registry,
                    config: PipelineConfig, model) -> tuple:
    if model is None:
        raise MissingCalibration(
            f"strategy {config.strategy!r} needs a trained calibration model")
    fs = _sample_features(sample_path, working)
    raw = keypoints.score_against_classes(fs, registry.feature_sets,
                                          ratio=config.match_ratio)
    z = calibration.z_scores(raw)
    conf = calibration.predict_confidences(model, z)
    outcome = fusion.top_k_outcome(fusion.VISUAL, conf, registry.class_ids,
                                   k=config.top_k)
    return outcome, raw, z, conf


def _text_outcome(img: Image, registry: Registry, config: PipelineConfig,
                  provider) -> tuple:
    text = textmatch.extract_text(img, provider)
    conf = textmatch.classify_text(text, registry.metas)
    outcome = fusion.top_k_outcome(fusion.TEXT, conf, registry.class_ids,
                                   k=config.top_k)
    return outcome, text, conf


def _legacy_detail(working_full: Image, registry: Registry,
                   config: PipelineConfig) -> dict:
    small = resize(working_full, config.legacy_width, config.legacy_height)
    hog = legacy.compute_hog(to_grayscale(small))
    if config.strategy == "hog_sp3":
        namer = legacy.CentroidNamer()
        key = "sp3_centroid"
    else:
        namer = legacy.FuzzyNamer()
        key = "sp3_fuzzy"
    sp3_vec = legacy.sp3(small, namer)
    sample_vec = legacy.combine_blocks(hog, sp3_vec, config.color_weight)
    sources = [(c.class_id,
                legacy.combine_blocks(c.legacy_vectors["hog"],
                                      c.legacy_vectors[key], config.color_weight))
               for c in registry.classes]
    ranked = legacy.classify_similarity(sample_vec, sources)
    chosen, sim = ranked[0]
    # cosine lands in [-1, 1]; shift to [0, 1] for score reporting
    scores = {cid: 0.5 * (s + 1.0) for cid, s in ranked}
    conf = 0.5 * (sim + 1.0)
    return {
        "chosen": int(chosen),
        "confidence": float(conf),
        "flagged": bool(conf < config.review_threshold),
        "reason": None,
        "class_scores": {str(c): float(scores.get(c, 0.0)) for c in registry.class_ids},
        "ranked": [[int(c), float(s)] for c, s in ranked],
    }


def classify(image_path, registry: Registry, config: Optional[PipelineConfig] = None,
             model: Optional[calibration.CalibrationModel] = None,
             provider=None) -> dict:
    """Classify one image; returns the JSON-ready detail record.

    The record always carries chosen class, confidence, flagged state and
    per-class scores; strategy-specific intermediates (raw match counts,
    z-scores, text words, fused means) are included when they exist.
    """
    config = config or PipelineConfig()
    img = load_image(image_path)
    working = resize(img, config.resize_width, config.resize_height)
    detail = {"sample": str(image_path), "strategy": config.strategy}

    if config.strategy in ("hog_sp3", "fuzzy_color"):
        detail.update(_legacy_detail(img, registry, config))
        return detail

    if config.strategy in ("sift", "fusion"):
        degenerate = False
        try:
            visual, raw, z, vconf = _visual_outcome(image_path, working,
                                                    registry, config, model)
        except DegenerateDistribution:
            degenerate = True
            visual, raw, z, vconf = None, None, None, None
        if raw is not None:
            detail["raw_scores"] = {str(c): int(s)
                                    for c, s in zip(registry.class_ids, raw)}
            detail["z_scores"] = {str(c): float(v)
                                  for c, v in zip(registry.class_ids, z)}
            detail["visual_confidences"] = {
                str(c): float(p) for c, p in zip(registry.class_ids, vconf)}

    if config.strategy == "sift":
        if degenerate:
            detail.update({"chosen": int(registry.class_ids[0]), "confidence": 0.0,
                           "flagged": True, "reason": "degenerate_scores",
                           "class_scores": {str(c): 0.0 for c in registry.class_ids}})
            return detail
        chosen, conf = visual.top[0]
        detail.update({
            "chosen": int(chosen),
            "confidence": float(conf),
            "flagged": bool(conf < config.review_threshold),
            "reason": None,
            "class_scores": {str(c): float(p)
                             for c, p in zip(registry.class_ids, vconf)},
            "visual_top": [[c, p] for c, p in visual.top],
        })
        return detail

    provider = provider or make_provider(config)
    text_outcome, text, tconf = _text_outcome(img, registry, config, provider)
    detail["text_words"] = list(text.words)
    detail["text_confidences"] = {str(c): float(p)
                                  for c, p in zip(registry.class_ids, tconf)}

    if config.strategy == "ocr":
        if text_outcome.top:
            chosen, conf = text_outcome.top[0]
        else:
            # no keyword matched anywhere: ties fall to the first class
            chosen, conf = registry.class_ids[0], 0.0
        detail.update({
            "chosen": int(chosen),
            "confidence": float(conf),
            "flagged": bool(conf < config.review_threshold),
            "reason": None,
            "class_scores": {str(c): float(p)
                             for c, p in zip(registry.class_ids, tconf)},
            "text_top": [[c, p] for c, p in text_outcome.top],
        })
        return detail

    # fusion
    if degenerate:
        if text_outcome.top:
            chosen, conf = text_outcome.top[0]
        else:
            chosen, conf = registry.class_ids[0], 0.0
        detail.update({
            "chosen": int(chosen), "confidence": float(conf), "flagged": True,
            "reason": "degenerate_scores",
            "class_scores": {str(c): float(p)
                             for c, p in zip(registry.class_ids, tconf)},
            "text_top": [[c, p] for c, p in text_outcome.top],
        })
        return detail
    if not text_outcome.top:
        # no text evidence at all: fall back to the visual decision, flagged
        chosen, conf = visual.top[0]
        detail.update({
            "chosen": int(chosen), "confidence": float(conf), "flagged": True,
            "reason": "no_text_evidence",
            "class_scores": {str(c): float(p)
                             for c, p in zip(registry.class_ids, vconf)},
            "visual_top": [[c, p] for c, p in visual.top],
            "text_top": [],
        })
        return detail
    rule = fusion.fuse if config.fusion_rule == "mean" else fusion.min_fuse
    decision = rule(visual, text_outcome, threshold=config.review_threshold)
    fused_scores = {c: (m if m is not None else 0.0) for c, m in decision.fused}
    detail.update({
        "chosen": int(decision.chosen),
        "confidence": float(decision.chosen_confidence),
        "flagged": bool(decision.flagged),
        "reason": decision.reason,
        "class_scores": {str(c): float(fused_scores.get(c, 0.0))
                         for c in registry.class_ids},
        "visual_top": [[c, p] for c, p in visual.top],
        "text_top": [[c, p] for c, p in text_outcome.top],
        "fused": [[c, m] for c, m in decision.fused],
    })
    return detail


# -- training and evaluation --------------------------------------------------------

def read_labels(corpus_dir) -> list:
    """(absolute sample path, class id) rows from a corpus labels.csv."""
    corpus_dir = Path(corpus_dir)
    labels_path = corpus_dir / "labels.csv"
    try:
        with open(labels_path, "r", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except FileNotFoundError as exc:
        raise IoError(f"labels file not found: {labels_path}") from exc
    out = []
    for rec in rows:
        try:
            out.append((corpus_dir / rec["sample"], int(rec["class_id"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad labels row {rec!r}") from exc
    if not out:
        raise SchemaError(f"no labeled samples in {labels_path}")
    return out


def train_calibration(corpus_dir, registry: Registry, out_path,
                      config: Optional[PipelineConfig] = None) -> calibration.CalibrationModel:
    """Score a labeled corpus visually, fit the z-score logistic model, save it.

    Every classified sample contributes one (z, label) pair per enrolled
    class; correctly and incorrectly classified samples both train the
    model.
    """
    config = config or PipelineConfig()
    labeled = read_labels(corpus_dir)
    if len(labeled) < calibration.MIN_SAMPLES:
        raise InsufficientData(
            f"need >= {calibration.MIN_SAMPLES} labeled samples, got {len(labeled)}")
    if len(set(cid for _, cid in labeled)) < 2:
        raise InsufficientData("need labeled samples from >= 2 classes")

    pairs = []

    def score(item):
        path, true_class = item
        img = load_image(path)
        working = resize(img, config.resize_width, config.resize_height)
        fs = _sample_features(path, working)
        raw = keypoints.score_against_classes(fs, registry.feature_sets,
                                              ratio=config.match_ratio)
        try:
            z = calibration.z_scores(raw)
        except DegenerateDistribution:
            return []
        return [(float(zv), 1 if cid == true_class else 0)
                for zv, cid in zip(z, registry.class_ids)]

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        for chunk in pool.map(score, labeled):
            pairs.extend(chunk)
    model = calibration.fit_logistic(pairs)
    calibration.save_model(model, out_path)
    return model


def evaluate(corpus_dir, registry: Registry, config: Optional[PipelineConfig] = None,
             model: Optional[calibration.CalibrationModel] = None,
             out_dir=None, provider=None) -> dict:
    """Classify a labeled corpus and write the report files.

    Emits report.json, decisions.csv, decisions.jsonl, roc.csv, roc.svg and
    review_queue.jsonl under out_dir (when given); returns the report dict.
    Two runs over identical inputs produce byte-identical outputs.
    """
    config = config or PipelineConfig()
    labeled = read_labels(corpus_dir)
    provider = provider or make_provider(config, corpus_dir=corpus_dir)

    def run(item):
        path, true_class = item
        detail = classify(path, registry, config, model=model, provider=provider)
        detail["true_class"] = true_class
        detail["sample"] = str(Path(path).relative_to(corpus_dir))
        return detail

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        details = list(pool.map(run, labeled))

    decisions = [(d["chosen"], d["true_class"]) for d in details]
    class_ids = registry.class_ids
    if len(class_ids) < 2:
        raise SingleClassInput("evaluation needs >= 2 enrolled classes")
    outcomes = []
    for d in details:
        for cid in class_ids:
            outcomes.append((d["class_scores"][str(cid)],
                             1 if cid == d["true_class"] else 0))
    counts, roc_report, per_class = evaluation.evaluate_outcomes(
        decisions, outcomes, class_ids)
    matrix = evaluation.multiclass_confusion(decisions, class_ids)

    report = {
        "schema_version": 1,
        "strategy": config.strategy,
        "fusion_rule": config.fusion_rule,
        "n_samples": len(details),
        "accuracy": evaluation.accuracy(counts),
        "auc": roc_report.auc,
        "sensitivity": evaluation.sensitivity(counts),
        "specificity": evaluation.specificity(counts),
        "confusion": {"tp": counts.tp, "fp": counts.fp,
                      "tn": counts.tn, "fn": counts.fn},
        "operating_point": {
            "accuracy": roc_report.accuracy,
            "sensitivity": roc_report.sensitivity,
            "specificity": roc_report.specificity,
        },
        "multiclass_confusion": {
            "class_ids": class_ids,
            "matrix": matrix.tolist(),
        },
        "per_class": {str(c): per_class[c] for c in class_ids},
        "flagged": sum(1 for d in details if d["flagged"]),
    }

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        _atomic_write(out_dir / "report.json",
                      json.dumps(report, indent=1, sort_keys=True) + "\n")
        lines = []
        for d in details:
            lines.append(json.dumps(d, sort_keys=True))
        _atomic_write(out_dir / "decisions.jsonl", "\n".join(lines) + "\n")
        with open(out_dir / "decisions.csv", "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["sample", "true_class", "predicted", "confidence",
                             "flagged"])
            for d in details:
                writer.writerow([d["sample"], d["true_class"], d["chosen"],
                                 repr(d["confidence"]), d["flagged"]])
        evaluation.write_roc_csv(roc_report.points, out_dir / "roc.csv")
        evaluation.write_roc_svg(roc_report.points, out_dir / "roc.svg")
        records = [fusion_record_from_detail(d) for d in details]
        fusion.export_review_queue(records, out_dir / "review_queue.jsonl")
    return report


def fusion_record_from_detail(detail: dict) -> dict:
    """Review-queue record from a classify detail dict."""
    return {
        "sample": detail.get("sample"),
        "visual_top": detail.get("visual_top", []),
        "text_top": detail.get("text_top", []),
        "fused": detail.get("fused", []),
        "chosen": detail.get("chosen"),
        "chosen_confidence": detail.get("confidence"),
        "flagged": detail.get("flagged", False),
        "reason": detail.get("reason"),
    }


def export_review_queue(eval_dir, out_path) -> int:
    """Re-export the flagged decisions of a previous evaluate run."""
    eval_dir = Path(eval_dir)
    src = eval_dir / "decisions.jsonl"
    try:
        with open(src, "r", encoding="utf-8") as fh:
            details = [json.loads(line) for line in fh if line.strip()]
    except FileNotFoundError as exc:
        raise IoError(f"no decisions.jsonl under {eval_dir}") from exc
    records = [fusion_record_from_detail(d) for d in details]
    return fusion.export_review_queue(records, out_path)
