"""Evaluation metrics: precision/recall sweeps, AUC, P@R100, PCU, boost.

A match labeling is a list of ``(correct, score)`` pairs, one per query
window. ``correct`` means the retrieved reference window index fell
inside the ground-truth range of the window's first frame. Sweeping an
acceptance threshold over the scores yields the precision-recall curve;
its trapezoidal area is the primary matching metric.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import GroundTruth
from .matcher import SequenceMatchSet

Label = tuple[bool, float]

COST_MODELS = ("naive", "cached")


@dataclass(frozen=True)
class PrCurve:
    """Threshold-swept precision-recall points (thresholds descending)."""

    points: list[tuple[float, float, float]]  # (threshold, precision, recall)
    auc: float

    def __post_init__(self):
        recalls = [r for _, _, r in self.points]
        if any(b < a - 1e-12 for a, b in zip(recalls, recalls[1:])):
            raise ValueError("recall must be non-decreasing along the curve")


@dataclass(frozen=True)
class PcuInputs:
    """Inputs to the performance-per-compute-unit formula."""

    p_r100: float
    t_e: float
    t_e_max: float

    def __post_init__(self):
        if not 0.0 <= self.p_r100 <= 1.0:
            raise ValueError("p_r100 must lie in [0, 1]")
        if not 0.0 < self.t_e <= self.t_e_max:
            raise ValueError("encoding times must satisfy 0 < t_e <= t_e_max")


@dataclass(frozen=True)
class MetricsReport:
    """All metrics for one (technique, dataset, sequence length) cell."""

    technique_name: str
    dataset_name: str
    k: int
    pr_curve: PrCurve
    auc: float
    p_r100: float
    pcu: float | None
    encode_time_model: str
    boost_pct_vs_k1: float | None

    def __post_init__(self):
        if self.k == 1 and self.boost_pct_vs_k1 not in (0.0, None):
            raise ValueError("boost_pct_vs_k1 must be 0 for the k=1 baseline")
        if self.encode_time_model not in COST_MODELS:
            raise ValueError(f"unknown encode_time_model: {self.encode_time_model!r}")

    def to_dict(self) -> dict:
        return {
            "technique": self.technique_name,
            "dataset": self.dataset_name,
            "k": self.k,
            "auc": float(self.auc),
            "p_r100": float(self.p_r100),
            "pcu": None if self.pcu is None else float(self.pcu),
            "encode_time_model": self.encode_time_model,
            "boost_pct_vs_k1": (None if self.boost_pct_vs_k1 is None
                                else float(self.boost_pct_vs_k1)),
            "pr_curve": [[float(v) for v in p] for p in self.pr_curve.points],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def label_matches(matches: SequenceMatchSet, gt: GroundTruth) -> list[Label]:
    """Per-window correctness and score.

    Window i is governed by the ground truth of its first frame: it is
    correct iff best_ref_window[i] lies in [lo_i, hi_i].
    """
    if matches.num_windows > len(gt):
        raise ValueError(
            f"ground truth covers {len(gt)} queries but there are "
            f"{matches.num_windows} query windows"
        )
    j = matches.best_ref_window
    idx = np.arange(matches.num_windows)
    correct = (gt.lo[idx] <= j) & (j <= gt.hi[idx])
    return [(bool(c), float(s)) for c, s in zip(correct, matches.best_score)]


def _split(labels: Sequence[Label]) -> tuple[np.ndarray, np.ndarray]:
    if len(labels) == 0:
        raise ValueError("labels must be non-empty")
    correct = np.array([bool(c) for c, _ in labels])
    scores = np.array([float(s) for _, s in labels], dtype=np.float64)
    return correct, scores


def precision_recall(labels: Sequence[Label], threshold: float) -> tuple[float, float]:
    """Precision and recall when accepting matches with score >= threshold.

    Both ratios are defined as 1.0 when their denominator is zero
    (nothing accepted, or nothing to recall).
    """
    correct, scores = _split(labels)
    accepted = scores >= threshold
    tp = int(np.sum(accepted & correct))
    fp = int(np.sum(accepted & ~correct))
    fn = int(np.sum(~accepted & correct))
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    return precision, recall


def pr_curve(labels: Sequence[Label]) -> PrCurve:
    """Sweep thresholds over the unique scores, descending.

    A sentinel threshold above the maximum score anchors the curve at
    recall 0 / precision 1. The curve's recall denominator is the total
    number of correct windows; with zero correct windows the curve is
    pinned at recall 0 and the area is 0. AUC is the trapezoid over the
    (recall, precision) points with (0, first precision) prepended.
    """
    correct, scores = _split(labels)
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    tp_cum = np.cumsum(correct[order].astype(np.int64))
    n_pos = int(tp_cum[-1])

    # Last index of each unique score = counts accepted at that threshold.
    is_last = np.ones(len(sorted_scores), dtype=bool)
    is_last[:-1] = sorted_scores[:-1] != sorted_scores[1:]
    last_idx = np.flatnonzero(is_last)

    thresholds = [float(sorted_scores[0]) + 1.0]
    precisions = [1.0]
    recalls = [0.0]
    for idx in last_idx:
        accepted = int(idx) + 1
        tp = int(tp_cum[idx])
        thresholds.append(float(sorted_scores[idx]))
        precisions.append(tp / accepted)
        recalls.append(tp / n_pos if n_pos else 0.0)

    auc = _trapezoid_auc(recalls, precisions)
    points = list(zip(thresholds, precisions, recalls))
    return PrCurve(points=points, auc=auc)


def _trapezoid_auc(recalls: Sequence[float], precisions: Sequence[float]) -> float:
    r = [0.0] + list(recalls)
    p = [precisions[0]] + list(precisions)
    area = 0.0
    for i in range(1, len(r)):
        area += (r[i] - r[i - 1]) * (p[i] + p[i - 1]) / 2.0
    return area


def p_at_r100(labels: Sequence[Label]) -> float:
    """Precision at the threshold accepting every window."""
    correct, _ = _split(labels)
    return float(np.sum(correct)) / len(correct)


def pcu(inputs: PcuInputs) -> float:
    """Performance-per-compute-unit: P_R100 * log10(t_e_max / t_e + 9).

    The +9 offset makes the heaviest technique (t_e = t_e_max) score
    exactly P_R100 instead of 0; base 10 gives log10(1 + 9) = 1 there.
    """
    if inputs.t_e <= 0:
        raise ValueError("t_e must be positive")
    return inputs.p_r100 * math.log10(inputs.t_e_max / inputs.t_e + 9.0)


def sequence_cost_model(t_e: float, k: int, model: str) -> float:
    """Per-query encoding cost at sequence length k.

    ``naive`` re-encodes all k frames of a window (k-fold cost);
    ``cached`` reuses frame descriptors across overlapping windows, so
    each frame is encoded once regardless of k.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if model == "naive":
        return t_e * k
    if model == "cached":
        return t_e
    raise ValueError(f"unknown cost model: {model!r}")


def boost_pct(auc_seq: float, auc_single: float) -> float:
    """Relative AUC change of sequence matching vs the k=1 baseline, in %."""
    if auc_single <= 0:
        raise ValueError("boost is undefined for a zero single-frame AUC")
    return 100.0 * (auc_seq - auc_single) / auc_single
