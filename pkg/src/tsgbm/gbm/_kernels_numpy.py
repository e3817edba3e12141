"""Pure-numpy fallbacks for the GBM inner loops.

Bit-identical to ``_kernels_numba``: ``np.bincount`` accumulates
sequentially over the row order, exactly like the jitted loop, and
predictions are accumulated per row in tree order starting from F0.
"""

from __future__ import annotations

import numpy as np


def node_histograms(binned, rows, grad, hess, max_bins):
    m = binned.shape[0]
    hg = np.zeros((m, max_bins))
    hh = np.zeros((m, max_bins))
    hc = np.zeros((m, max_bins), dtype=np.int64)
    g = grad[rows]
    h = hess[rows]
    for j in range(m):
        b = binned[j, rows]
        hg[j] = np.bincount(b, weights=g, minlength=max_bins)
        hh[j] = np.bincount(b, weights=h, minlength=max_bins)
        hc[j] = np.bincount(b, minlength=max_bins)
    return hg, hh, hc


def _route(feature, left, right, start, go_left_fn, n):
    node = np.full(n, start, dtype=np.int64)
    while True:
        internal = feature[node] >= 0
        if not internal.any():
            return node
        idx = np.flatnonzero(internal)
        nd = node[idx]
        go_left = go_left_fn(idx, nd)
        node[idx] = np.where(go_left, left[nd], right[nd])


def route_binned(binned, feature, bin_threshold, left, right):
    H = binned.shape[1]

    def go_left(idx, nd):
        return binned[feature[nd], idx] <= bin_threshold[nd]

    return _route(feature, left, right, 0, go_left, H).astype(np.int32)


def predict_forest(X, feature, threshold, left, right, value, offsets, f0):
    n = X.shape[0]
    out = np.full(n, f0)
    for t in range(offsets.size - 1):

        def go_left(idx, nd):
            return X[idx, feature[nd]] <= threshold[nd]

        leaf = _route(feature, left, right, int(offsets[t]), go_left, n)
        out += value[leaf]
    return out
