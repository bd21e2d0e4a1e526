"""Independent brute-force references used to check the library outputs.

Everything here is written with plain loops against the definitions, on
purpose: these functions must not share any code path with the package.
"""

from __future__ import annotations

import numpy as np


def brute_force_matches(sim: np.ndarray, k: int):
    """Triple-loop window matching: argmax of mean diagonal scores.

    Returns (best_j, best_score) arrays over the Q-k+1 query windows.
    Ties go to the smallest reference index via strict > comparison.
    """
    q, r = sim.shape
    qw, rw = q - k + 1, r - k + 1
    best_j = np.zeros(qw, dtype=np.int64)
    best_score = np.full(qw, -np.inf)
    for i in range(qw):
        for j in range(rw):
            total = 0.0
            for t in range(k):
                total += sim[i + t, j + t]
            score = total / k
            if score > best_score[i]:
                best_score[i] = score
                best_j[i] = j
    return best_j, best_score


def brute_force_window_scores(sim: np.ndarray, k: int) -> np.ndarray:
    q, r = sim.shape
    out = np.zeros((q - k + 1, r - k + 1))
    for i in range(out.shape[0]):
        for j in range(out.shape[1]):
            total = 0.0
            for t in range(k):
                total += sim[i + t, j + t]
            out[i, j] = total / k
    return out


def reference_pr_points(labels):
    """Threshold sweep by direct counting, duplicating the curve contract.

    Thresholds are the unique scores descending plus a sentinel above the
    maximum; recall counts against the total number of correct labels and
    is pinned to 0 when there are none.
    """
    n_pos = sum(1 for c, _ in labels if c)
    scores = sorted({s for _, s in labels}, reverse=True)
    thresholds = [scores[0] + 1.0] + scores
    points = []
    for t in thresholds:
        accepted = [(c, s) for c, s in labels if s >= t]
        tp = sum(1 for c, _ in accepted if c)
        precision = tp / len(accepted) if accepted else 1.0
        recall = tp / n_pos if n_pos else 0.0
        points.append((t, precision, recall))
    return points


def reference_auc(labels) -> float:
    """Trapezoid over the reference PR points, (0, first precision) prepended."""
    points = reference_pr_points(labels)
    recalls = [0.0] + [r for _, _, r in points]
    precisions = [points[0][1]] + [p for _, p, _ in points]
    area = 0.0
    for i in range(1, len(recalls)):
        area += (recalls[i] - recalls[i - 1]) * (precisions[i] + precisions[i - 1]) / 2.0
    return area
