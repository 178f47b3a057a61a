"""Dense linear assignment kernel, the hot loop of the transport oracle.

A compiled Cython kernel is preferred; a vectorized pure-Python twin of the
same algorithm is selected at import time when the extension is unavailable
or when ``W2ASSIM_PURE_PYTHON=1`` is set.  Both return identical
assignments; see ``benchmarks/bench_assignment.py`` for the speed gap.
"""

import os

import numpy as np

from . import _dense_py

if os.environ.get("W2ASSIM_PURE_PYTHON") == "1":
    _impl = _dense_py
    USING_COMPILED = False
else:
    try:
        from . import _dense as _impl  # type: ignore[no-redef]

        USING_COMPILED = True
    except ImportError:
        _impl = _dense_py
        USING_COMPILED = False


def lap_dense(cost):
    """Min-cost perfect matching on a square cost matrix.

    Returns ``(col4row, u, v)``: column matched to each row, plus dual
    potentials certifying optimality (reduced costs are nonnegative up to
    roundoff and zero on matched pairs).
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost matrix contains non-finite entries")
    return _impl.lap_dense(cost)


__all__ = ["lap_dense", "USING_COMPILED"]
