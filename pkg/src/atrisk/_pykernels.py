"""Pure-numpy implementations of the hot kernels.

These mirror ``atrisk._ckernels`` operation for operation: every candidate
value is produced by the same sequence of double-precision operations, so the
two backends agree bitwise on integer-valued (0/1) inputs and to rounding
error otherwise.
"""

import numpy as np


def pairwise_sqdist(x, y):
    """Squared Euclidean distances between the rows of two matrices.

    Returns an (n, m) float64 array for x of shape (n, d) and y of
    shape (m, d).
    """
    n = x.shape[0]
    out = np.empty((n, y.shape[0]), dtype=np.float64)
    for i in range(n):
        diff = y - x[i]
        out[i] = (diff * diff).sum(axis=1)
    return out


def split_scan(values, labels):
    """Best binary-split position of one feature under weighted Gini.

    ``values`` must be sorted ascending with ``labels`` (1 = positive class)
    aligned to it.  Candidate thresholds are midpoints between distinct
    consecutive values; the first strict minimum wins, which is the lowest
    threshold.  Returns ``(found, weighted_gini, threshold)``.
    """
    n = values.shape[0]
    if n < 2:
        return 0, np.inf, 0.0
    valid = values[1:] != values[:-1]
    if not valid.any():
        return 0, np.inf, 0.0
    total = float(labels.sum())
    ntot = float(n)
    nl = np.arange(1, n, dtype=np.float64)
    nr = ntot - nl
    cl1 = np.cumsum(labels[:-1], dtype=np.float64)
    cl0 = nl - cl1
    cr1 = total - cl1
    cr0 = nr - cr1
    wg = (nl - (cl0 * cl0 + cl1 * cl1) / nl
          + nr - (cr0 * cr0 + cr1 * cr1) / nr) / ntot
    wg = np.where(valid, wg, np.inf)
    k = int(np.argmin(wg))
    threshold = (values[k] + values[k + 1]) / 2.0
    return 1, float(wg[k]), float(threshold)
