# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled matrix-assembly kernels.

Qubit axes are 0-based, MSB first; see _assembly_py for the reference
semantics.
"""

import numpy as np


def mean_column(double[:, ::1] means):
    """out[x] = prod_l means[l, bit_l(x)] for all 2^n outcomes x."""
    cdef Py_ssize_t n = means.shape[0]
    cdef Py_ssize_t dim = 1
    cdef Py_ssize_t l, x, size
    for l in range(n):
        dim <<= 1
    out = np.empty(dim, dtype=np.float64)
    cdef double[::1] w = out
    w[0] = 1.0
    size = 1
    for l in range(n):
        for x in range(size - 1, -1, -1):
            w[2 * x + 1] = w[x] * means[l, 1]
            w[2 * x] = w[x] * means[l, 0]
        size <<= 1
    return out


def pair_column(double[:, ::1] means, long long[:, ::1] pairs,
                double[:, :, ::1] covs):
    """Sum over pairs of cov[p, bit_i, bit_j] * prod_{l != i,j} means[l, bit_l]."""
    cdef Py_ssize_t n = means.shape[0]
    cdef Py_ssize_t npairs = pairs.shape[0]
    cdef Py_ssize_t dim = 1
    cdef Py_ssize_t p, l, x, size, i, j, shift_i, shift_j
    cdef double f0, f1
    for l in range(n):
        dim <<= 1
    out = np.zeros(dim, dtype=np.float64)
    cdef double[::1] acc = out
    buf = np.empty(dim, dtype=np.float64)
    cdef double[::1] w = buf
    for p in range(npairs):
        i = pairs[p, 0]
        j = pairs[p, 1]
        w[0] = 1.0
        size = 1
        for l in range(n):
            if l == i or l == j:
                f0 = 1.0
                f1 = 1.0
            else:
                f0 = means[l, 0]
                f1 = means[l, 1]
            for x in range(size - 1, -1, -1):
                w[2 * x + 1] = w[x] * f1
                w[2 * x] = w[x] * f0
            size <<= 1
        shift_i = n - 1 - i
        shift_j = n - 1 - j
        for x in range(dim):
            acc[x] += covs[p, (x >> shift_i) & 1, (x >> shift_j) & 1] * w[x]
    return out
