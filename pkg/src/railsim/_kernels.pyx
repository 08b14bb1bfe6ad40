# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled scan kernels for the correlated loss and delay processes.

Semantics match ``_kernels_py`` exactly; keep the two in sync.  The
arithmetic is written with the same operation order as the fallback so
results are bit-identical (the build disables FP contraction).
"""

import numpy as np

from libc.math cimport sqrt


def sticky_scan(double[::1] u_fresh, double[::1] u_repeat, double rate,
                double corr, int prev):
    """First-order sticky Bernoulli process; see _kernels_py.sticky_scan."""
    cdef Py_ssize_t n = u_fresh.shape[0]
    out_arr = np.empty(n, dtype=np.uint8)
    if n == 0:
        return out_arr, prev
    cdef unsigned char[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int p = prev
    cdef int cur
    for i in range(n):
        if p != -1 and u_repeat[i] < corr:
            cur = p
        else:
            cur = 1 if u_fresh[i] < rate else 0
        out[i] = <unsigned char> cur
        p = cur
    return out_arr, p


def ar1_scan(double[::1] eps, double corr, double prev, bint has_prev):
    """AR(1) scan; see _kernels_py.ar1_scan."""
    cdef Py_ssize_t n = eps.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    if n == 0:
        return out_arr, prev
    cdef double[::1] out = out_arr
    cdef double s = sqrt(1.0 - corr * corr)
    cdef double x = prev
    cdef double a, b
    cdef Py_ssize_t i, start = 0
    if not has_prev:
        x = eps[0]
        out[0] = x
        start = 1
    for i in range(start, n):
        a = corr * x
        b = s * eps[i]
        x = a + b
        out[i] = x
    return out_arr, x
