"""Numba implementations of the hot GBM inner loops.

Must stay bit-identical to ``_kernels_numpy``: same accumulation order
(sequential over rows), same routing logic.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def node_histograms(binned, rows, grad, hess, max_bins):
    """Per-feature (grad, hess, count) histograms over one node's rows.

    ``binned`` is feature-major, shape (m, H); ``rows`` the node's row
    indices in ascending order.
    """
    m = binned.shape[0]
    hg = np.zeros((m, max_bins))
    hh = np.zeros((m, max_bins))
    hc = np.zeros((m, max_bins), dtype=np.int64)
    for j in range(m):
        col = binned[j]
        for t in range(rows.size):
            i = rows[t]
            b = col[i]
            hg[j, b] += grad[i]
            hh[j, b] += hess[i]
            hc[j, b] += 1
    return hg, hh, hc


@njit(cache=True)
def route_binned(binned, feature, bin_threshold, left, right):
    """Leaf node index of one tree for every training row (bin routing)."""
    H = binned.shape[1]
    out = np.empty(H, dtype=np.int32)
    for i in range(H):
        node = 0
        while feature[node] >= 0:
            if binned[feature[node], i] <= bin_threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = node
    return out


@njit(cache=True)
def predict_forest(X, feature, threshold, left, right, value, offsets, f0):
    """F0 plus the summed leaf contributions of a concatenated forest.

    Node arrays hold all trees back to back; ``offsets[t]`` is tree t's
    root, with child indices already absolute.  Accumulation is per row in
    tree order, starting from F0, matching the training-time bookkeeping.
    """
    n = X.shape[0]
    out = np.empty(n)
    for i in range(n):
        s = f0
        for t in range(offsets.size - 1):
            node = offsets[t]
            while feature[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            s += value[node]
        out[i] = s
    return out
