# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: divisor sieve and compensated running sums."""

from libc.math cimport fabs

import numpy as np

cimport numpy as cnp

cnp.import_array()


def divisor_sieve(lam):
    """out[n] = sum of lam[m] over divisors m of n; lam[0] ignored."""
    cdef double[::1] a = np.ascontiguousarray(lam, dtype=np.float64)
    cdef Py_ssize_t N = a.shape[0] - 1
    out_arr = np.zeros(N + 1, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t m, j
    cdef double x
    for m in range(1, N + 1):
        x = a[m]
        for j in range(m, N + 1, m):
            out[j] += x
    return out_arr


def compensated_cumsum(x):
    """Neumaier running sums: out[i] = x[0] + ... + x[i] with carried error."""
    cdef double[::1] a = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double s = 0.0, c = 0.0, t, v
    cdef Py_ssize_t i
    for i in range(n):
        v = a[i]
        t = s + v
        if fabs(s) >= fabs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i] = s + c
    return out_arr
