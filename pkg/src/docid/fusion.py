"""Fusion of the visual and text classifier confidences.

The final decision averages the two classifiers' confidences over classes
present in BOTH top-3 lists; a class missing from either list is excluded
("NA"). When the lists share no class, the single highest confidence wins
and the decision is flagged for review, as it is when the fused confidence
falls below the review threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EmptyOutcome

VISUAL = "visual"
TEXT = "text"

TOP_K = 3
DEFAULT_REVIEW_THRESHOLD = 0.5

REASON_LOW_CONFIDENCE = "low_confidence"
REASON_NO_COMMON_CLASS = "no_common_class"


@dataclass(frozen=True)
class ClassifierOutcome:
    """Top-scoring classes of one classifier, confidences non-increasing."""

    classifier_id: str
    top: tuple  # of (class_id, confidence)

    def __post_init__(self):
        entries = [(int(c), float(p)) for c, p in self.top]
        ids = [c for c, _ in entries]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate class ids in outcome")
        entries.sort(key=lambda cp: -cp[1])  # stable: ties keep given order
        object.__setattr__(self, "top", tuple(entries))

    def confidence_of(self, class_id: int) -> Optional[float]:
        for c, p in self.top:
            if c == class_id:
                return p
        return None


def top_k_outcome(classifier_id: str, confidences, class_ids,
                  k: int = TOP_K) -> ClassifierOutcome:
    """Build an outcome from a per-class confidence vector.

    Ties are broken by class order (stable sort over the given order).
    Zero-confidence classes are not detections and are left out (the
    reference fusion table prints such entries as "NA"), so the outcome
    may carry fewer than k entries, or none at all.
    """
    conf = np.asarray(confidences, dtype=np.float64)
    order = np.argsort(-conf, kind="stable")[:k]
    return ClassifierOutcome(
        classifier_id, tuple((int(class_ids[i]), float(conf[i]))
                             for i in order if conf[i] > 0.0))


@dataclass(frozen=True)
class FusionDecision:
    """Fused means over the union of both top lists; None marks "NA"."""

    fused: tuple  # of (class_id, Optional[float])
    chosen: int
    chosen_confidence: float
    flagged: bool
    reason: Optional[str] = None


def _combine(a: ClassifierOutcome, b: ClassifierOutcome, op,
             threshold: float) -> FusionDecision:
    if not a.top or not b.top:
        raise EmptyOutcome("both classifier outcomes must be non-empty")
    union = [c for c, _ in a.top] + [c for c, _ in b.top if a.confidence_of(c) is None]
    fused = []
    best_class, best_conf = None, -1.0
    for c in union:
        pa = a.confidence_of(c)
        pb = b.confidence_of(c)
        if pa is None or pb is None:
            fused.append((c, None))
            continue
        m = op(pa, pb)
        fused.append((c, m))
        # ties go to the smaller class id so fusion is argument-symmetric
        if m > best_conf or (m == best_conf and c < best_class):
            best_class, best_conf = c, m
    if best_class is None:
        # no common class: fall back to the single highest confidence anywhere
        candidates = list(a.top) + list(b.top)
        best_class, best_conf = max(candidates, key=lambda cp: (cp[1], -cp[0]))
        return FusionDecision(tuple(fused), int(best_class), float(best_conf),
                              True, REASON_NO_COMMON_CLASS)
    flagged = best_conf < threshold
    return FusionDecision(tuple(fused), int(best_class), float(best_conf),
                          flagged, REASON_LOW_CONFIDENCE if flagged else None)


def fuse(visual: ClassifierOutcome, text: ClassifierOutcome,
         threshold: float = DEFAULT_REVIEW_THRESHOLD) -> FusionDecision:
    """Arithmetic-mean fusion over the intersection of the top lists."""
    return _combine(visual, text, lambda p, q: 0.5 * (p + q), threshold)


def min_fuse(visual: ClassifierOutcome, text: ClassifierOutcome,
             threshold: float = DEFAULT_REVIEW_THRESHOLD) -> FusionDecision:
    """Min fusion variant, kept for comparison with the mean rule."""
    return _combine(visual, text, min, threshold)


def flag_for_review(decision: FusionDecision) -> bool:
    return decision.flagged


def review_record(sample_id: str, visual: ClassifierOutcome,
                  text: ClassifierOutcome, decision: FusionDecision) -> dict:
    """One review-queue entry (JSON-serializable)."""
    return {
        "sample": sample_id,
        "visual_top": [[c, p] for c, p in visual.top],
        "text_top": [[c, p] for c, p in text.top],
        "fused": [[c, p] for c, p in decision.fused],
        "chosen": decision.chosen,
        "chosen_confidence": decision.chosen_confidence,
        "flagged": decision.flagged,
        "reason": decision.reason,
    }


def export_review_queue(records, path) -> int:
    """Write flagged records as JSON lines; returns the number written."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            if rec.get("flagged"):
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
                n += 1
    return n
