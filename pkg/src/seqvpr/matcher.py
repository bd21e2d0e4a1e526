"""Frame-pair similarity and aligned sequence-window matching.

Matching slides a window of k consecutive query frames over every
k-frame reference window at the same frame rate (offset-aligned, no
velocity search). A window pair's score is the arithmetic mean of its k
frame-pair scores; per query window the best reference window is the
argmax, ties broken by the smallest reference index.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .descriptor import Descriptor, DescriptorSet, read_matrix_svpr1, write_matrix_svpr1

ZERO_NORM_EPS = 1e-12


@dataclass(frozen=True)
class SimilarityMatrix:
    """Dense Q x R matrix of query/reference frame similarities."""

    scores: np.ndarray

    def __post_init__(self):
        scores = np.ascontiguousarray(self.scores, dtype=np.float64)
        object.__setattr__(self, "scores", scores)
        if scores.ndim != 2 or scores.size == 0:
            raise ValueError("similarity matrix must be 2-D and non-empty")
        if not np.isfinite(scores).all():
            raise ValueError("similarity matrix contains non-finite values")

    @property
    def num_queries(self) -> int:
        return self.scores.shape[0]

    @property
    def num_refs(self) -> int:
        return self.scores.shape[1]


@dataclass(frozen=True)
class SequenceMatchSet:
    """Best reference window and score for every query window, one k."""

    k: int
    best_ref_window: np.ndarray
    best_score: np.ndarray

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.best_ref_window.shape != self.best_score.shape:
            raise ValueError("index and score arrays must have equal length")

    @property
    def num_windows(self) -> int:
        return len(self.best_ref_window)


def cosine_similarity(a: Descriptor, b: Descriptor) -> float:
    """dot(a, b) / (|a| |b|); 0.0 when either vector is effectively zero."""
    if len(a) != len(b):
        raise ValueError(f"descriptor dimensions differ: {len(a)} vs {len(b)}")
    if a.l2_norm < ZERO_NORM_EPS or b.l2_norm < ZERO_NORM_EPS:
        return 0.0
    dot = float(np.dot(a.values.astype(np.float64), b.values.astype(np.float64)))
    return float(np.clip(dot / (a.l2_norm * b.l2_norm), -1.0, 1.0))


def build_similarity_matrix(queries: DescriptorSet, refs: DescriptorSet) -> SimilarityMatrix:
    """Cosine similarity of every query/reference descriptor pair."""
    if queries.dim != refs.dim:
        raise ValueError(f"descriptor dimensions differ: {queries.dim} vs {refs.dim}")
    q = queries.matrix.astype(np.float64)
    r = refs.matrix.astype(np.float64)
    q_norms = np.where(queries.norms < ZERO_NORM_EPS, 1.0, queries.norms)
    r_norms = np.where(refs.norms < ZERO_NORM_EPS, 1.0, refs.norms)
    q = q / q_norms[:, None]
    r = r / r_norms[:, None]
    q[queries.norms < ZERO_NORM_EPS] = 0.0
    r[refs.norms < ZERO_NORM_EPS] = 0.0
    scores = np.clip(q @ r.T, -1.0, 1.0)
    return SimilarityMatrix(scores=scores)


def window_scores(sim: SimilarityMatrix, k: int, method: str = "direct") -> np.ndarray:
    """Score every (query window, reference window) pair.

    ``direct`` accumulates the k diagonal entries (compiled kernel when
    available); ``prefix`` uses the O(Q*R) cumulative-sum evaluation.
    """
    if method == "direct":
        return kernels.window_score_matrix(sim.scores, k)
    if method == "prefix":
        return kernels.window_score_matrix_prefix(sim.scores, k)
    raise ValueError(f"unknown window scoring method: {method!r}")


def match_sequences(sim: SimilarityMatrix, k: int) -> SequenceMatchSet:
    """Best-matching reference window for each of the Q-k+1 query windows."""
    if not 1 <= k <= min(sim.num_queries, sim.num_refs):
        raise ValueError(
            f"k={k} out of range for a {sim.num_queries}x{sim.num_refs} similarity matrix"
        )
    scores = window_scores(sim, k)
    # np.argmax returns the first maximum, i.e. the smallest reference index.
    best_j = np.argmax(scores, axis=1)
    best = scores[np.arange(scores.shape[0]), best_j]
    return SequenceMatchSet(k=k, best_ref_window=best_j.astype(np.int64), best_score=best)


def single_frame_matches(sim: SimilarityMatrix) -> SequenceMatchSet:
    """Single-frame baseline; identical to ``match_sequences(sim, 1)``."""
    return match_sequences(sim, 1)


def save_similarity(sim: SimilarityMatrix, path: str | Path) -> None:
    """Dump the matrix in SVPR1 form (N=Q, D=R) for offline inspection."""
    write_matrix_svpr1(path, sim.scores.astype(np.float32))


def load_similarity(path: str | Path) -> SimilarityMatrix:
    return SimilarityMatrix(scores=read_matrix_svpr1(path).astype(np.float64))
