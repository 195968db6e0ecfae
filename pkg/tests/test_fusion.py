"""Top-3 mean/min fusion and the review flag."""

import json

import pytest

from docid.errors import EmptyOutcome
from docid.fusion import (
    ClassifierOutcome,
    FusionDecision,
    export_review_queue,
    flag_for_review,
    fuse,
    min_fuse,
    review_record,
    top_k_outcome,
)

# confidence values from the reference fusion table
SIFT_S1 = ClassifierOutcome("visual", ((1, 0.99875), (6, 0.00062), (5, 0.00062)))
OCR_S1 = ClassifierOutcome("text", ((1, 0.9768), (6, 0.01381)))
SIFT_S2 = ClassifierOutcome("visual", ((8, 0.994), (15, 0.031), (9, 0.001)))
OCR_S2 = ClassifierOutcome("text", ((26, 0.01), (15, 0.98), (25, 0.01)))


class TestFuse:
    def test_reference_sample_1(self):
        d = fuse(SIFT_S1, OCR_S1)
        assert d.chosen == 1
        assert d.chosen_confidence == pytest.approx(0.98778, abs=1e-5)
        fused = dict(d.fused)
        assert fused[6] == pytest.approx(0.007215, abs=1e-5)
        assert fused[5] is None  # the "NA" cell
        assert not d.flagged

    def test_reference_sample_2_intersection_rule(self):
        d = fuse(SIFT_S2, OCR_S2)
        # class 8 holds 0.994 visually but is absent from the text list
        assert d.chosen == 15
        assert d.chosen_confidence == pytest.approx(0.5055, abs=1e-5)
        fused = dict(d.fused)
        assert fused[8] is None and fused[26] is None

    def test_identical_single_class(self):
        a = ClassifierOutcome("visual", ((3, 0.9),))
        b = ClassifierOutcome("text", ((3, 0.6),))
        d = fuse(a, b)
        assert d.chosen == 3
        assert d.chosen_confidence == pytest.approx(0.75)

    def test_symmetry(self):
        d1 = fuse(SIFT_S2, OCR_S2)
        d2 = fuse(OCR_S2, SIFT_S2)
        assert d1.chosen == d2.chosen
        assert d1.chosen_confidence == d2.chosen_confidence

    def test_no_common_class_fallback_flags(self):
        a = ClassifierOutcome("visual", ((1, 0.8), (2, 0.1)))
        b = ClassifierOutcome("text", ((3, 0.5), (4, 0.4)))
        d = fuse(a, b)
        assert d.chosen == 1 and d.chosen_confidence == pytest.approx(0.8)
        assert d.flagged and d.reason == "no_common_class"

    def test_low_confidence_flag(self):
        a = ClassifierOutcome("visual", ((1, 0.4),))
        b = ClassifierOutcome("text", ((1, 0.3),))
        d = fuse(a, b, threshold=0.5)
        assert d.flagged and d.reason == "low_confidence"
        assert fuse(a, b, threshold=0.1).flagged is False

    def test_empty_outcome_rejected(self):
        with pytest.raises(EmptyOutcome):
            fuse(ClassifierOutcome("visual", ()), OCR_S1)

    def test_confidence_stays_in_range(self):
        d = fuse(SIFT_S1, OCR_S1)
        for _, m in d.fused:
            if m is not None:
                assert 0.0 <= m <= 1.0

    def test_dominant_class_wins_both_rules(self):
        a = ClassifierOutcome("visual", ((7, 0.9), (1, 0.2), (2, 0.1)))
        b = ClassifierOutcome("text", ((7, 0.8), (2, 0.3), (1, 0.05)))
        assert fuse(a, b).chosen == 7
        assert min_fuse(a, b).chosen == 7


class TestMinFuse:
    def test_min_rule(self):
        a = ClassifierOutcome("visual", ((4, 0.9),))
        b = ClassifierOutcome("text", ((4, 0.6),))
        d = min_fuse(a, b)
        assert d.chosen == 4
        assert d.chosen_confidence == pytest.approx(0.6)

    def test_reference_sample_1_min(self):
        d = min_fuse(SIFT_S1, OCR_S1)
        assert d.chosen == 1
        assert d.chosen_confidence == pytest.approx(0.9768)
        assert dict(d.fused)[6] == pytest.approx(0.00062)

    def test_disjoint_fallback_same_as_mean(self):
        a = ClassifierOutcome("visual", ((1, 0.8),))
        b = ClassifierOutcome("text", ((3, 0.5),))
        d = min_fuse(a, b)
        assert d.flagged and d.reason == "no_common_class"
        assert d.chosen == 1


class TestOutcome:
    def test_sorted_non_increasing(self):
        o = ClassifierOutcome("text", ((26, 0.01), (15, 0.98), (25, 0.01)))
        assert [c for c, _ in o.top] == [15, 26, 25]
        confs = [p for _, p in o.top]
        assert confs == sorted(confs, reverse=True)

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ValueError):
            ClassifierOutcome("text", ((1, 0.5), (1, 0.4)))

    def test_top_k_builder_ties_by_class_order(self):
        o = top_k_outcome("text", [0.5, 0.9, 0.5, 0.1], [10, 11, 12, 13], k=3)
        assert [c for c, _ in o.top] == [11, 10, 12]

    def test_top_k_drops_zero_confidence(self):
        o = top_k_outcome("text", [0.0, 0.4, 0.0], [1, 2, 3], k=3)
        assert o.top == ((2, 0.4),)
        assert top_k_outcome("text", [0.0, 0.0], [1, 2]).top == ()


class TestReview:
    def test_flag_passthrough(self):
        d = FusionDecision((), 1, 0.9, False, None)
        assert flag_for_review(d) is False
        d = FusionDecision((), 1, 0.2, True, "low_confidence")
        assert flag_for_review(d) is True

    @pytest.mark.parametrize("conf,threshold,expect", [
        (0.99, 0.5, False), (0.3, 0.5, True)])
    def test_threshold_cases(self, conf, threshold, expect):
        a = ClassifierOutcome("visual", ((1, conf),))
        b = ClassifierOutcome("text", ((1, conf),))
        assert fuse(a, b, threshold=threshold).flagged is expect

    def test_export_writes_only_flagged(self, tmp_path):
        d_ok = fuse(SIFT_S1, OCR_S1)
        a = ClassifierOutcome("visual", ((1, 0.2),))
        b = ClassifierOutcome("text", ((2, 0.3),))
        d_bad = fuse(a, b)
        records = [review_record("s0", SIFT_S1, OCR_S1, d_ok),
                   review_record("s1", a, b, d_bad)]
        path = tmp_path / "queue.jsonl"
        n = export_review_queue(records, path)
        assert n == 1
        lines = [json.loads(l) for l in path.read_text().splitlines()]
        assert len(lines) == 1
        assert lines[0]["sample"] == "s1"
        assert lines[0]["reason"] == "no_common_class"
