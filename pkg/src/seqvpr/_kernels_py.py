"""Pure-NumPy window-scoring kernels.

``window_score_matrix`` is the fallback for the compiled extension and
accumulates shifted submatrices in ascending t order, which makes it
bit-identical to the compiled loop. ``window_score_matrix_prefix`` is an
O(Q*R) cumulative-sum evaluation of the same scores; it may differ from
the direct form by floating-point rounding only.
"""

from __future__ import annotations

import numpy as np


def _check_k(sim: np.ndarray, k: int) -> None:
    q, r = sim.shape
    if k < 1 or k > q or k > r:
        raise ValueError(f"k={k} out of range for a {q}x{r} similarity matrix")


def window_score_matrix(sim: np.ndarray, k: int) -> np.ndarray:
    """Mean of k aligned diagonal entries for every window pair."""
    sim = np.ascontiguousarray(sim, dtype=np.float64)
    _check_k(sim, k)
    q, r = sim.shape
    qw, rw = q - k + 1, r - k + 1
    out = sim[0:qw, 0:rw].copy()
    for t in range(1, k):
        out += sim[t:t + qw, t:t + rw]
    out /= k
    return out


def window_score_matrix_prefix(sim: np.ndarray, k: int) -> np.ndarray:
    """Same scores via prefix sums along diagonals, O(Q*R) for any k."""
    sim = np.ascontiguousarray(sim, dtype=np.float64)
    _check_k(sim, k)
    q, r = sim.shape
    qw, rw = q - k + 1, r - k + 1
    # Shear rows left so matrix diagonals become columns, then cumsum
    # down each column: csum[i, j] = sum(sim[i-t, j-t... ] ) per diagonal.
    sheared = np.zeros((q + 1, r), dtype=np.float64)
    cols = np.arange(r)
    for i in range(q):
        sheared[i + 1] = np.roll(sim[i], -i)
    np.cumsum(sheared, axis=0, out=sheared)
    window_sums = sheared[k:] - sheared[:-k]  # (q-k+1, r) diagonal sums
    out = np.empty((qw, rw), dtype=np.float64)
    for i in range(qw):
        # window (i, j) lives on sheared column (j - i) mod r
        out[i] = window_sums[i, np.mod(cols[:rw] - i, r)]
    out /= k
    return out
