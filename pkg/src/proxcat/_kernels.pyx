# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: batched distances and metastability window scans.

Kind codes: 0 Euclidean rows, 1 half-plane rows (x, y), 2 spider rows (ray, r).
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, asinh, fabs

cnp.import_array()


cdef inline double _dist(int kind, const double[:, ::1] P, Py_ssize_t i,
                         const double[:, ::1] Q, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t k
    cdef double s = 0.0, dx, dy
    if kind == 0:
        for k in range(P.shape[1]):
            dx = P[i, k] - Q[j, k]
            s += dx * dx
        return sqrt(s)
    elif kind == 1:
        dx = P[i, 0] - Q[j, 0]
        dy = P[i, 1] - Q[j, 1]
        return 2.0 * asinh(sqrt(dx * dx + dy * dy) / (2.0 * sqrt(P[i, 1] * Q[j, 1])))
    else:
        if P[i, 0] == Q[j, 0] or P[i, 1] == 0.0 or Q[j, 1] == 0.0:
            return fabs(P[i, 1] - Q[j, 1])
        return P[i, 1] + Q[j, 1]


def batch_dist(int kind, const double[:, ::1] P, const double[:, ::1] Q):
    cdef Py_ssize_t n = P.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _dist(kind, P, i, Q, i)
    return out


def window_witness_real(const double[::1] a, const cnp.int64_t[::1] ends, double eps):
    cdef Py_ssize_t N, i, m = ends.shape[0], found = -1
    cdef double lo, hi
    with nogil:
        for N in range(m):
            lo = a[N]
            hi = a[N]
            for i in range(N + 1, ends[N] + 1):
                if a[i] < lo:
                    lo = a[i]
                elif a[i] > hi:
                    hi = a[i]
                if hi - lo > eps:
                    break
            if hi - lo <= eps:
                found = N
                break
    return found


def window_witness_points(int kind, const double[:, ::1] P, const cnp.int64_t[::1] ends,
                          double eps):
    cdef Py_ssize_t N, i, j, m = ends.shape[0], found = -1
    cdef bint ok
    with nogil:
        for N in range(m):
            ok = True
            for i in range(N, ends[N] + 1):
                for j in range(i + 1, ends[N] + 1):
                    if _dist(kind, P, i, P, j) > eps:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                found = N
                break
    return found
