# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: pairwise squared distances and Gini split scans.

Kept in lockstep with ``atrisk._pykernels`` — same formulas in the same
operation order, so both backends agree bitwise on 0/1 inputs.
"""

import numpy as np

from libc.math cimport INFINITY


def pairwise_sqdist(const double[:, ::1] x, const double[:, ::1] y):
    """Squared Euclidean distances between the rows of two matrices."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t m = y.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    out_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, t
    cdef double acc, diff
    for i in range(n):
        for j in range(m):
            acc = 0.0
            for t in range(d):
                diff = x[i, t] - y[j, t]
                acc += diff * diff
            out[i, j] = acc
    return out_arr


def split_scan(const double[::1] values, const unsigned char[::1] labels):
    """Best binary-split position of one feature under weighted Gini.

    Same contract as the python backend: values sorted ascending, labels
    aligned, first strict minimum (lowest threshold) wins.
    """
    cdef Py_ssize_t n = values.shape[0]
    if n < 2:
        return 0, INFINITY, 0.0
    cdef double total = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        total += labels[i]
    cdef double ntot = <double> n
    cdef double best = INFINITY
    cdef double best_thr = 0.0
    cdef int found = 0
    cdef double c1 = 0.0
    cdef double nl, nr, cl0, cl1, cr0, cr1, wg
    for i in range(n - 1):
        c1 += labels[i]
        if values[i + 1] != values[i]:
            nl = <double> (i + 1)
            nr = ntot - nl
            cl1 = c1
            cl0 = nl - cl1
            cr1 = total - cl1
            cr0 = nr - cr1
            wg = (nl - (cl0 * cl0 + cl1 * cl1) / nl
                  + nr - (cr0 * cr0 + cr1 * cr1) / nr) / ntot
            if wg < best:
                best = wg
                best_thr = (values[i] + values[i + 1]) / 2.0
                found = 1
    if not found:
        return 0, INFINITY, 0.0
    return 1, best, best_thr
