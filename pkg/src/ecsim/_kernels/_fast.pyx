# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled numeric kernels: COO accumulation, partial-pivot LU, matvec.

Contracts mirror ``_pure.py`` exactly; tests run both backends against the
same oracles.
"""

import numpy as np

cimport cython
from libc.math cimport fabs

PIVOT_RTOL = 1e-14
cdef double _PIVOT_RTOL = 1e-14


def assemble_dense(int n, int[::1] rows, int[::1] cols, double[::1] vals):
    a = np.zeros((n, n))
    cdef double[:, ::1] av = a
    cdef Py_ssize_t k, m = rows.shape[0]
    for k in range(m):
        av[rows[k], cols[k]] += vals[k]
    return a


def lu_solve_inplace(double[:, ::1] a, double[::1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, k, p
    cdef double amax = 0.0, v, piv, m, tol, acc
    if n == 0:
        return 0
    for i in range(n):
        for j in range(n):
            v = fabs(a[i, j])
            if v > amax:
                amax = v
    tol = _PIVOT_RTOL * amax
    for k in range(n):
        p = k
        piv = fabs(a[k, k])
        for i in range(k + 1, n):
            v = fabs(a[i, k])
            if v > piv:
                piv = v
                p = i
        if piv <= tol:
            return k + 1
        if p != k:
            for j in range(n):
                v = a[k, j]
                a[k, j] = a[p, j]
                a[p, j] = v
            v = b[k]
            b[k] = b[p]
            b[p] = v
        for i in range(k + 1, n):
            m = a[i, k] / a[k, k]
            if m != 0.0:
                for j in range(k + 1, n):
                    a[i, j] -= m * a[k, j]
                b[i] -= m * b[k]
            a[i, k] = 0.0
    for k in range(n - 1, -1, -1):
        acc = b[k]
        for j in range(k + 1, n):
            acc -= a[k, j] * b[j]
        b[k] = acc / a[k, k]
    return 0


def coo_matvec(int[::1] rows, int[::1] cols, double[::1] vals, double[::1] x, int n):
    y = np.zeros(n)
    cdef double[::1] yv = y
    cdef Py_ssize_t k, m = rows.shape[0]
    for k in range(m):
        yv[rows[k]] += vals[k] * x[cols[k]]
    return y
