"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set ``PROXCAT_PURE=1`` to force the fallback.
"""

import os

import numpy as np

from . import _kernels_py

try:
    if os.environ.get("PROXCAT_PURE", "") not in ("", "0"):
        raise ImportError("pure backend requested")
    from . import _kernels as _impl

    BACKEND = "compiled"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"

BACKENDS = {"python": _kernels_py}
if BACKEND == "compiled":
    BACKENDS["compiled"] = _impl


def _rows(A):
    A = np.ascontiguousarray(A, dtype=np.float64)
    return A.reshape(len(A), -1) if A.ndim == 1 else A


def batch_dist(kind, P, Q, backend=None):
    impl = BACKENDS[backend] if backend else _impl
    P, Q = _rows(P), _rows(Q)
    if P.shape != Q.shape:
        P, Q = np.broadcast_arrays(P, Q)
        P, Q = np.ascontiguousarray(P), np.ascontiguousarray(Q)
    return impl.batch_dist(kind, P, Q)


def window_witness_real(a, ends, eps, backend=None):
    impl = BACKENDS[backend] if backend else _impl
    a = np.ascontiguousarray(a, dtype=np.float64)
    ends = np.ascontiguousarray(ends, dtype=np.int64)
    return int(impl.window_witness_real(a, ends, float(eps)))


def window_witness_points(kind, P, ends, eps, backend=None):
    impl = BACKENDS[backend] if backend else _impl
    ends = np.ascontiguousarray(ends, dtype=np.int64)
    return int(impl.window_witness_points(kind, _rows(P), ends, float(eps)))
