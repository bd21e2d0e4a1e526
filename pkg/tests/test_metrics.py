import itertools
import json
import math

import numpy as np
import pytest

from oracles import reference_auc, reference_pr_points
from seqvpr.dataset import aligned_ground_truth
from seqvpr.matcher import SequenceMatchSet
from seqvpr.metrics import (
    MetricsReport,
    PcuInputs,
    PrCurve,
    boost_pct,
    label_matches,
    p_at_r100,
    pcu,
    pr_curve,
    precision_recall,
    sequence_cost_model,
)

# Hand-computed fixture: thresholds {1.9, .9, .8, .7} give PR points
# (1,0), (1,.5), (.5,.5), (2/3,1); the trapezoid area is 19/24.
THREE_LABELS = [(True, 0.9), (False, 0.8), (True, 0.7)]
THREE_LABEL_AUC = 19.0 / 24.0


def matches(best_j, scores, k=1):
    return SequenceMatchSet(k=k, best_ref_window=np.asarray(best_j, dtype=np.int64),
                            best_score=np.asarray(scores, dtype=np.float64))


class TestLabelMatches:
    def test_inside_range_is_correct(self):
        gt = aligned_ground_truth(10, 10, tolerance=2)
        labels = label_matches(matches([5], [0.9]), gt)
        # query 0 accepts refs [0, 2]; j=5 is wrong, j within range is right
        assert labels[0] == (False, 0.9)
        labels = label_matches(matches([1], [0.8]), gt)
        assert labels[0] == (True, 0.8)

    def test_explicit_range_bounds(self):
        gt = aligned_ground_truth(10, 20, tolerance=0)
        # entry 5 is [5, 5]
        assert label_matches(matches([5] * 6, [0.5] * 6), gt)[5][0] is True
        assert label_matches(matches([6] * 6, [0.5] * 6), gt)[5][0] is False

    def test_window_uses_first_frame_ground_truth(self):
        gt = aligned_ground_truth(10, 10, tolerance=0)
        m = matches([0, 1, 2], [0.5, 0.5, 0.5], k=3)
        labels = label_matches(m, gt)
        assert [c for c, _ in labels] == [True, True, True]
        m_off = matches([1, 1, 1], [0.5, 0.5, 0.5], k=3)
        assert [c for c, _ in label_matches(m_off, gt)] == [False, True, False]

    def test_missing_ground_truth_entry(self):
        gt = aligned_ground_truth(2, 10, tolerance=0)
        with pytest.raises(ValueError, match="query windows"):
            label_matches(matches([0, 1, 2], [0.1, 0.2, 0.3]), gt)


class TestPrecisionRecall:
    def test_precision_eight_of_ten(self):
        labels = [(True, 1.0)] * 8 + [(False, 1.0)] * 2
        precision, _ = precision_recall(labels, threshold=0.5)
        assert precision == 0.8

    def test_recall_eight_of_ten(self):
        labels = [(True, 1.0)] * 8 + [(True, 0.0)] * 2
        _, recall = precision_recall(labels, threshold=0.5)
        assert recall == 0.8

    def test_threshold_below_everything(self):
        labels = [(True, 0.3), (True, 0.9)]
        assert precision_recall(labels, threshold=0.0) == (1.0, 1.0)

    def test_vacuous_conventions(self):
        labels = [(True, 0.5)]
        precision, recall = precision_recall(labels, threshold=0.9)
        assert precision == 1.0  # nothing accepted
        labels = [(False, 0.5)]
        _, recall = precision_recall(labels, threshold=0.9)
        assert recall == 1.0  # nothing to recall

    def test_empty_labels_rejected(self):
        with pytest.raises(ValueError, match="non-empty"):
            precision_recall([], threshold=0.5)


class TestPrCurve:
    def test_hand_computed_three_label_fixture(self):
        curve = pr_curve(THREE_LABELS)
        assert curve.auc == pytest.approx(THREE_LABEL_AUC, abs=1e-9)

    def test_all_correct_gives_unit_area(self):
        labels = [(True, s) for s in (0.9, 0.5, 0.7, 0.3)]
        assert pr_curve(labels).auc == pytest.approx(1.0, abs=1e-12)

    def test_none_correct_gives_zero_area(self):
        labels = [(False, s) for s in (0.9, 0.5, 0.7)]
        assert pr_curve(labels).auc == pytest.approx(0.0, abs=1e-12)

    def test_matches_reference_on_all_labelings_of_eight(self):
        scores = [0.95, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3]
        for bits in itertools.product([False, True], repeat=8):
            labels = list(zip(bits, scores))
            curve = pr_curve(labels)
            assert curve.auc == pytest.approx(reference_auc(labels), abs=1e-12)
            ref_points = reference_pr_points(labels)
            assert len(curve.points) == len(ref_points)
            for got, want in zip(curve.points, ref_points):
                assert got == pytest.approx(want, abs=1e-12)

    def test_random_labeling_auc_near_base_rate(self):
        rng = np.random.default_rng(20)
        n = 5000
        scores = rng.uniform(size=n)
        correct = rng.uniform(size=n) < 0.37
        auc = pr_curve(list(zip(correct, scores))).auc
        assert auc == pytest.approx(0.37, abs=0.03)

    def test_recall_non_decreasing_and_thresholds_descending(self):
        rng = np.random.default_rng(21)
        labels = [(bool(c), float(s)) for c, s in
                  zip(rng.uniform(size=50) < 0.5, rng.uniform(size=50))]
        curve = pr_curve(labels)
        thresholds = [t for t, _, _ in curve.points]
        recalls = [r for _, _, r in curve.points]
        assert thresholds == sorted(thresholds, reverse=True)
        assert all(b >= a for a, b in zip(recalls, recalls[1:]))

    def test_tied_scores_collapse_to_one_threshold(self):
        labels = [(True, 0.5), (False, 0.5), (True, 0.5)]
        curve = pr_curve(labels)
        assert len(curve.points) == 2  # sentinel + one real threshold
        _, precision, recall = curve.points[-1]
        assert precision == pytest.approx(2 / 3)
        assert recall == 1.0

    def test_score_scaling_invariance(self):
        rng = np.random.default_rng(22)
        for _ in range(50):
            n = int(rng.integers(2, 40))
            labels = [(bool(c), float(s)) for c, s in
                      zip(rng.uniform(size=n) < 0.5, rng.uniform(0.1, 1.0, size=n))]
            scale = float(rng.uniform(0.25, 8.0))
            scaled = [(c, s * scale) for c, s in labels]
            a, b = pr_curve(labels), pr_curve(scaled)
            assert b.auc == pytest.approx(a.auc, abs=1e-9)
            for (_, p1, r1), (_, p2, r2) in zip(a.points, b.points):
                assert (p2, r2) == pytest.approx((p1, r1), abs=1e-12)

    def test_monotone_recall_enforced_by_type(self):
        with pytest.raises(ValueError, match="non-decreasing"):
            PrCurve(points=[(1.0, 1.0, 0.5), (0.5, 1.0, 0.2)], auc=0.5)


class TestPAtR100:
    def test_seventy_two_of_ninety_six(self):
        labels = [(True, 0.5)] * 72 + [(False, 0.5)] * 24
        assert p_at_r100(labels) == 0.75

    def test_all_and_none(self):
        assert p_at_r100([(True, 0.1)] * 5) == 1.0
        assert p_at_r100([(False, 0.1)] * 5) == 0.0

    def test_equals_last_pr_curve_point_precision(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            n = int(rng.integers(1, 30))
            labels = [(bool(c), float(s)) for c, s in
                      zip(rng.uniform(size=n) < 0.4, rng.uniform(size=n))]
            curve = pr_curve(labels)
            assert p_at_r100(labels) == pytest.approx(curve.points[-1][1], abs=1e-12)


class TestPcu:
    def test_equal_times_give_exactly_p(self):
        assert pcu(PcuInputs(p_r100=1.0, t_e=0.77, t_e_max=0.77)) == 1.0
        assert pcu(PcuInputs(p_r100=0.6, t_e=0.5, t_e_max=0.5)) == pytest.approx(0.6)

    def test_hog_vs_netvlad_multiplier(self):
        # log10(0.77 / 0.0043 + 9) = log10(188.0698) = 2.2743...
        value = pcu(PcuInputs(p_r100=1.0, t_e=0.0043, t_e_max=0.77))
        assert value == pytest.approx(2.2744, abs=1e-3)
        assert value == pytest.approx(math.log10(0.77 / 0.0043 + 9.0), abs=1e-15)

    def test_zero_precision_zero_pcu(self):
        assert pcu(PcuInputs(p_r100=0.0, t_e=0.1, t_e_max=0.5)) == 0.0

    def test_monotone_decreasing_in_encoding_time(self):
        grid = np.linspace(0.001, 0.77, 100)
        values = [pcu(PcuInputs(p_r100=0.8, t_e=float(t), t_e_max=0.77)) for t in grid]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ValueError):
            PcuInputs(p_r100=0.5, t_e=0.0, t_e_max=1.0)
        with pytest.raises(ValueError):
            PcuInputs(p_r100=0.5, t_e=2.0, t_e_max=1.0)
        with pytest.raises(ValueError):
            PcuInputs(p_r100=1.5, t_e=0.5, t_e_max=1.0)


class TestSequenceCostModel:
    def test_naive_scales_k_fold(self):
        assert sequence_cost_model(0.36, 5, "naive") == pytest.approx(1.8)

    def test_naive_k1_unchanged(self):
        assert sequence_cost_model(0.36, 1, "naive") == 0.36

    def test_cached_ignores_k(self):
        assert sequence_cost_model(0.36, 5, "cached") == 0.36

    def test_invalid(self):
        with pytest.raises(ValueError):
            sequence_cost_model(0.36, 0, "naive")
        with pytest.raises(ValueError):
            sequence_cost_model(0.36, 2, "lazy")


class TestBoostPct:
    def test_fifty_percent(self):
        assert boost_pct(0.75, 0.50) == pytest.approx(50.0)

    def test_no_change(self):
        assert boost_pct(0.50, 0.50) == 0.0

    def test_regression_is_negative(self):
        assert boost_pct(0.40, 0.50) == pytest.approx(-20.0)

    def test_zero_baseline_undefined(self):
        with pytest.raises(ValueError, match="undefined"):
            boost_pct(0.5, 0.0)


class TestMetricsReport:
    def make(self, k=2, boost=10.0):
        curve = pr_curve(THREE_LABELS)
        return MetricsReport(technique_name="HOG", dataset_name="campus", k=k,
                             pr_curve=curve, auc=curve.auc, p_r100=2 / 3, pcu=1.5,
                             encode_time_model="naive", boost_pct_vs_k1=boost)

    def test_k1_requires_zero_boost(self):
        with pytest.raises(ValueError, match="baseline"):
            self.make(k=1, boost=5.0)

    def test_json_roundtrip(self):
        report = self.make()
        data = json.loads(report.to_json())
        assert data["technique"] == "HOG"
        assert data["k"] == 2
        assert data["auc"] == pytest.approx(THREE_LABEL_AUC)
        assert len(data["pr_curve"]) == len(report.pr_curve.points)
