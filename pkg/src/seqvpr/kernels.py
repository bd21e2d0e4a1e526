"""Backend selection for the window-scoring hot path.

The compiled extension is preferred when present; the NumPy fallback is
bit-identical, so selection never changes results. Set the environment
variable ``SEQVPR_PURE_PYTHON=1`` before import to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

_impl = _kernels_py
_BACKEND = "python"

if not os.environ.get("SEQVPR_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled

        _impl = _compiled
        _BACKEND = "compiled"
    except ImportError:
        pass


def backend() -> str:
    """Name of the active kernel backend: "compiled" or "python"."""
    return _BACKEND


def window_score_matrix(sim: np.ndarray, k: int) -> np.ndarray:
    """Dispatch to the active backend; see _kernels_py for the contract."""
    sim = np.ascontiguousarray(sim, dtype=np.float64)
    return _impl.window_score_matrix(sim, k)


window_score_matrix_prefix = _kernels_py.window_score_matrix_prefix
