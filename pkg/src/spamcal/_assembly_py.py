"""NumPy fallback for the matrix-assembly kernels.

Same contract as the Cython extension ``_assembly_cy``: qubit axes are
0-based here, MSB first, matching the bitstring index convention.
"""

from __future__ import annotations

import numpy as np


def mean_column(means: np.ndarray) -> np.ndarray:
    """out[x] = prod_l means[l, bit_l(x)] for all 2^n outcomes x."""
    v = np.ones(1)
    for row in means:
        v = np.kron(v, row)
    return v


def pair_column(means: np.ndarray, pairs: np.ndarray, covs: np.ndarray) -> np.ndarray:
    """Sum over pairs of cov[p, bit_i, bit_j] * prod_{l != i,j} means[l, bit_l]."""
    n = means.shape[0]
    out = np.zeros(1 << n)
    ones = np.ones(2)
    for p in range(pairs.shape[0]):
        i, j = int(pairs[p, 0]), int(pairs[p, 1])
        v = np.ones(1)
        for l in range(n):
            v = np.kron(v, ones if l in (i, j) else means[l])
        shape = [1] * n
        shape[i] = 2
        shape[j] = 2
        cov = covs[p]
        if i > j:
            cov = cov.T
        term = v.reshape((2,) * n) * cov.reshape(shape)
        out += term.ravel()
    return out
