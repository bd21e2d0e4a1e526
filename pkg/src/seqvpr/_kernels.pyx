# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled window-scoring kernel.

Must stay bit-identical to seqvpr._kernels_py: per (i, j) the diagonal
entries are accumulated in ascending t order, then divided by k once.
"""

import numpy as np


def window_score_matrix(double[:, ::1] sim, Py_ssize_t k):
    """Mean of k aligned diagonal entries for every window pair.

    Returns a (Q-k+1, R-k+1) float64 matrix W with
    W[i, j] = mean(sim[i+t, j+t] for t in range(k)).
    """
    cdef Py_ssize_t q = sim.shape[0]
    cdef Py_ssize_t r = sim.shape[1]
    if k < 1 or k > q or k > r:
        raise ValueError(f"k={k} out of range for a {q}x{r} similarity matrix")
    cdef Py_ssize_t qw = q - k + 1
    cdef Py_ssize_t rw = r - k + 1
    out = np.empty((qw, rw), dtype=np.float64)
    cdef double[:, ::1] w = out
    cdef Py_ssize_t i, j, t
    cdef double acc
    for i in range(qw):
        for j in range(rw):
            acc = 0.0
            for t in range(k):
                acc += sim[i + t, j + t]
            w[i, j] = acc / k
    return out
