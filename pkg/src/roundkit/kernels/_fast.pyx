# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernels.

Fused loops over the point batch: no temporary (m, rows) matrices are
materialized, which is what makes these faster than the numpy fallback for
the small desk-scale dimensions this package targets.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, pow, sqrt

cnp.import_array()

BACKEND = "compiled"


def abs_dot_max(double[:, ::1] rows, double[:, ::1] points):
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    cdef Py_ssize_t r = rows.shape[0]
    if rows.shape[1] != n:
        raise ValueError("row/point dimension mismatch")
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef double best, acc
    for i in range(m):
        best = 0.0
        for j in range(r):
            acc = 0.0
            for k in range(n):
                acc += rows[j, k] * points[i, k]
            acc = fabs(acc)
            if acc > best:
                best = acc
        out[i] = best
    return out_arr


def factor_norm(double[:, ::1] factor, double[:, ::1] points):
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    cdef Py_ssize_t r = factor.shape[0]
    if factor.shape[1] != n:
        raise ValueError("factor/point dimension mismatch")
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef double acc, total
    for i in range(m):
        total = 0.0
        for j in range(r):
            acc = 0.0
            for k in range(n):
                acc += factor[j, k] * points[i, k]
            total += acc * acc
        out[i] = sqrt(total)
    return out_arr


def pnorm_rows(double[:, ::1] points, double p):
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, k
    cdef double acc, v
    cdef bint inf_norm = p == float("inf")
    if inf_norm:
        for i in range(m):
            acc = 0.0
            for k in range(n):
                v = fabs(points[i, k])
                if v > acc:
                    acc = v
            out[i] = acc
    elif p == 1.0:
        for i in range(m):
            acc = 0.0
            for k in range(n):
                acc += fabs(points[i, k])
            out[i] = acc
    elif p == 2.0:
        for i in range(m):
            acc = 0.0
            for k in range(n):
                v = points[i, k]
                acc += v * v
            out[i] = sqrt(acc)
    else:
        for i in range(m):
            acc = 0.0
            for k in range(n):
                acc += pow(fabs(points[i, k]), p)
            out[i] = pow(acc, 1.0 / p)
    return out_arr
