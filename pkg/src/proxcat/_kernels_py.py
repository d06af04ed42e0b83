"""Numpy implementations of the compiled kernels, used when the extension is absent."""

import numpy as np


def _rowwise(kind, P, Q):
    if kind == 0:
        return np.sqrt(np.sum((P - Q) ** 2, axis=-1))
    if kind == 1:
        h = np.hypot(P[..., 0] - Q[..., 0], P[..., 1] - Q[..., 1])
        return 2.0 * np.arcsinh(h / (2.0 * np.sqrt(P[..., 1] * Q[..., 1])))
    same = (P[..., 0] == Q[..., 0]) | (P[..., 1] == 0.0) | (Q[..., 1] == 0.0)
    return np.where(same, np.abs(P[..., 1] - Q[..., 1]), P[..., 1] + Q[..., 1])


def batch_dist(kind, P, Q):
    return _rowwise(kind, np.asarray(P, dtype=np.float64), np.asarray(Q, dtype=np.float64))


def window_witness_real(a, ends, eps):
    a = np.asarray(a, dtype=np.float64)
    for N, end in enumerate(ends):
        w = a[N : int(end) + 1]
        if w.max() - w.min() <= eps:
            return N
    return -1


def window_witness_points(kind, P, ends, eps):
    P = np.asarray(P, dtype=np.float64)
    for N, end in enumerate(ends):
        w = P[N : int(end) + 1]
        if len(w) < 2:
            return N
        D = _rowwise(kind, w[:, None, :], w[None, :, :])
        if D.max() <= eps:
            return N
    return -1
