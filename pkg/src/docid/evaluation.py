"""Confusion counts, accuracy, ROC/AUC reporting.

Evaluation follows the one-vs-rest binary folding used for the reference
tables: a correct prediction counts one TP and one TN, an incorrect one
counts one FP and one FN, so accuracy, sensitivity and specificity agree.
The standard multiclass confusion matrix is also available.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, SingleClassInput

OPERATING_THRESHOLD = 0.5


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(decisions) -> ConfusionCounts:
    """Symmetric binary folding of (predicted, true) pairs."""
    decisions = list(decisions)
    if not decisions:
        raise EmptyInput("no decisions to fold")
    correct = sum(1 for pred, true in decisions if pred == true)
    wrong = len(decisions) - correct
    return ConfusionCounts(tp=correct, fp=wrong, tn=correct, fn=wrong)


def accuracy(c: ConfusionCounts) -> float:
    if c.total == 0:
        raise EmptyInput("empty confusion counts")
    return (c.tp + c.tn) / c.total


def sensitivity(c: ConfusionCounts) -> float:
    if c.tp + c.fn == 0:
        raise EmptyInput("no positives")
    return c.tp / (c.tp + c.fn)


def specificity(c: ConfusionCounts) -> float:
    if c.tn + c.fp == 0:
        raise EmptyInput("no negatives")
    return c.tn / (c.tn + c.fp)


def multiclass_confusion(decisions, class_ids) -> np.ndarray:
    """Standard matrix[true, predicted] over the given class order."""
    decisions = list(decisions)
    if not decisions:
        raise EmptyInput("no decisions")
    index = {c: i for i, c in enumerate(class_ids)}
    mat = np.zeros((len(class_ids), len(class_ids)), dtype=np.int64)
    for pred, true in decisions:
        mat[index[true], index[pred]] += 1
    return mat


@dataclass(frozen=True)
class RocReport:
    """Threshold-sweep curve plus operating metrics at threshold 0.5."""

    points: tuple  # of (fpr, tpr), sorted by fpr, endpoints included
    auc: float
    accuracy: float
    sensitivity: float
    specificity: float


def roc(outcomes) -> RocReport:
    """ROC analysis of (score, label) pairs with trapezoidal AUC.

    The sweep visits each distinct score descending (predict positive at
    score >= threshold); ties therefore move along straight segments, which
    makes the trapezoid AUC equal the Mann-Whitney pair statistic with
    half-credit ties.
    """
    pairs = [(float(s), int(l)) for s, l in outcomes]
    if not pairs:
        raise EmptyInput("no outcomes")
    scores = np.array([s for s, _ in pairs])
    labels = np.array([l for _, l in pairs])
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise SingleClassInput("ROC needs both labels present")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    cum_tp = np.cumsum(sorted_labels == 1)
    cum_fp = np.cumsum(sorted_labels == 0)
    # indices where the score changes next (threshold boundaries)
    distinct = np.nonzero(np.diff(sorted_scores))[0]
    cut = np.append(distinct, len(sorted_scores) - 1)
    tpr = np.concatenate([[0.0], cum_tp[cut] / n_pos])
    fpr = np.concatenate([[0.0], cum_fp[cut] / n_neg])
    auc = float(np.trapezoid(tpr, fpr))

    predicted_pos = scores >= OPERATING_THRESHOLD
    tp = int(np.sum(predicted_pos & (labels == 1)))
    fp = int(np.sum(predicted_pos & (labels == 0)))
    tn = n_neg - fp
    fn = n_pos - tp
    return RocReport(
        points=tuple((float(f), float(t)) for f, t in zip(fpr, tpr)),
        auc=auc,
        accuracy=(tp + tn) / len(pairs),
        sensitivity=tp / n_pos,
        specificity=tn / n_neg,
    )


def evaluate_outcomes(decisions, outcomes, class_ids):
    """Shared evaluation core: decisions fold + ROC + per-class table.

    decisions: (predicted, true) pairs per sample. outcomes: (score, label)
    pairs, one per (sample, class) under one-vs-rest folding.
    """
    counts = confusion(decisions)
    report = roc(outcomes)
    per_class = {}
    for cid in class_ids:
        cls = [(p, t) for p, t in decisions if t == cid]
        per_class[cid] = {
            "samples": len(cls),
            "correct": sum(1 for p, t in cls if p == t),
        }
    return counts, report, per_class


def write_roc_csv(points, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("fpr,tpr\n")
        for f, t in points:
            fh.write(f"{f!r},{t!r}\n")


def write_roc_svg(points, path, size: int = 400) -> None:
    """Minimal deterministic SVG polyline of the ROC curve."""
    margin = 40
    span = size - 2 * margin

    def sx(v):
        return margin + v * span

    def sy(v):
        return size - margin - v * span

    pts = " ".join(f"{sx(f):.2f},{sy(t):.2f}" for f, t in points)
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">\n'
        f'<rect width="{size}" height="{size}" fill="white"/>\n'
        f'<line x1="{sx(0):.2f}" y1="{sy(0):.2f}" x2="{sx(1):.2f}" y2="{sy(1):.2f}" '
        f'stroke="#bbbbbb" stroke-dasharray="4"/>\n'
        f'<polyline points="{pts}" fill="none" stroke="#1f6fb2" stroke-width="2"/>\n'
        f'<line x1="{sx(0):.2f}" y1="{sy(0):.2f}" x2="{sx(1):.2f}" y2="{sy(0):.2f}" stroke="black"/>\n'
        f'<line x1="{sx(0):.2f}" y1="{sy(0):.2f}" x2="{sx(0):.2f}" y2="{sy(1):.2f}" stroke="black"/>\n'
        f'<text x="{size / 2:.0f}" y="{size - 8}" text-anchor="middle" '
        f'font-size="12">false positive rate</text>\n'
        f'<text x="12" y="{size / 2:.0f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 12 {size / 2:.0f})">true positive rate</text>\n'
        "</svg>\n"
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg)
