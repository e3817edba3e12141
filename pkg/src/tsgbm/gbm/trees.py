"""Histogram-binned regression trees grown best-first.

Split search maximizes the second-order gain
G_L^2/(H_L+eps) + G_R^2/(H_R+eps) - G^2/(H+eps) over pre-binned feature
values; leaf values are -soft_threshold(G, lambda)/(H+eps).  Ties break
deterministically toward the lowest feature index, then lowest threshold.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from ..backend import get_kernels
from ..core import DomainError

LEAF_EPS = 1e-12


@dataclass
class BinnedData:
    """Training features mapped to per-feature bin indices (feature-major)."""

    binned: np.ndarray  # (m, H) int32
    edges: list[np.ndarray]  # per-feature split thresholds, len nbins-1
    nbins: np.ndarray  # (m,) int64

    @property
    def n_features(self) -> int:
        return self.binned.shape[0]

    @property
    def max_bins(self) -> int:
        return int(self.nbins.max())


def bin_features(X: np.ndarray, max_bins: int = 255) -> BinnedData:
    """Quantile-style binning, at most ``max_bins`` bins per feature.

    If a feature has <= max_bins distinct values every value gets its own
    bin (thresholds at midpoints), so small datasets reproduce exhaustive
    split search exactly.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DomainError("feature matrix must be 2-D")
    H, m = X.shape
    binned = np.empty((m, H), dtype=np.int32)
    edges = []
    nbins = np.empty(m, dtype=np.int64)
    for j in range(m):
        col = X[:, j]
        uniq = np.unique(col)
        if uniq.size <= max_bins:
            thresholds = 0.5 * (uniq[:-1] + uniq[1:])
        else:
            qs = np.quantile(col, np.arange(1, max_bins) / max_bins, method="linear")
            thresholds = np.unique(qs)
        edges.append(thresholds)
        nbins[j] = thresholds.size + 1
        binned[j] = np.searchsorted(thresholds, col, side="left").astype(np.int32)
    return BinnedData(binned=binned, edges=edges, nbins=nbins)


@dataclass
class Tree:
    """Flat node arrays; ``feature < 0`` marks a leaf holding ``value``."""

    feature: np.ndarray  # int32
    bin_threshold: np.ndarray  # int32 (split bin, training-side routing)
    threshold: np.ndarray  # float64 (raw value, prediction-side routing)
    left: np.ndarray  # int32
    right: np.ndarray  # int32
    value: np.ndarray  # float64, leaf contribution

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    @property
    def n_leaves(self) -> int:
        return int(np.count_nonzero(self.feature < 0))

    def scale_values(self, factor: float) -> None:
        self.value = self.value * factor

    def route_rows(self, binned: np.ndarray) -> np.ndarray:
        """Per-row leaf node index over pre-binned training data."""
        return get_kernels().route_binned(
            binned, self.feature, self.bin_threshold, self.left, self.right
        )


def _best_split(hg, hh, hc, nbins, g_tot, h_tot, min_leaf):
    """Best (gain, feature, bin) over all features, or gain <= 0 if none.

    The cumulative scans run over a (m, max_bins) block; the row-major
    argmax realizes the lowest-feature-then-lowest-threshold tie-break.
    """
    m, max_bins = hg.shape
    gl = np.cumsum(hg, axis=1)
    hl = np.cumsum(hh, axis=1)
    cl = np.cumsum(hc, axis=1)
    c_tot = int(cl[0, -1])
    bins = np.arange(max_bins)
    valid = (
        (bins[None, :] < (nbins - 1)[:, None])
        & (cl >= min_leaf)
        & (c_tot - cl >= min_leaf)
    )
    gr = g_tot - gl
    hr = h_tot - hl
    parent = g_tot * g_tot / (h_tot + LEAF_EPS)
    with np.errstate(invalid="ignore"):
        gains = gl * gl / (hl + LEAF_EPS) + gr * gr / (hr + LEAF_EPS) - parent
    gains = np.where(valid, gains, -np.inf)
    flat = int(np.argmax(gains))
    j, b = divmod(flat, max_bins)
    return float(gains[j, b]), j, b


def _leaf_value(g: float, h: float, l1: float) -> float:
    num = np.sign(g) * max(abs(g) - l1, 0.0)
    return -num / (h + LEAF_EPS)


def grow_tree(
    data: BinnedData,
    rows: np.ndarray,
    grad: np.ndarray,
    hess: np.ndarray,
    *,
    max_depth: int,
    num_leaves: int,
    min_data_in_leaf: int,
    l1: float,
) -> Tree:
    """Best-first growth under simultaneous depth and leaf-count caps.

    ``rows`` must be ascending so histogram accumulation order is
    reproducible across backends.
    """
    kernels = get_kernels()
    feature, bin_thr, thr, left, right, depth = [], [], [], [], [], []
    node_rows: dict[int, np.ndarray] = {}
    node_split: dict[int, tuple[float, int, int]] = {}
    node_gh: dict[int, tuple[float, float]] = {}

    def new_node(rows_n: np.ndarray, d: int) -> int:
        nid = len(feature)
        feature.append(-1)
        bin_thr.append(-1)
        thr.append(0.0)
        left.append(-1)
        right.append(-1)
        depth.append(d)
        node_rows[nid] = rows_n
        node_gh[nid] = (float(grad[rows_n].sum()), float(hess[rows_n].sum()))
        return nid

    def evaluate(nid: int) -> float:
        rows_n = node_rows[nid]
        if depth[nid] >= max_depth or rows_n.size < 2 * min_data_in_leaf:
            return -np.inf
        hg, hh, hc = kernels.node_histograms(
            data.binned, rows_n, grad, hess, data.max_bins
        )
        g_tot, h_tot = node_gh[nid]
        gain, j, b = _best_split(hg, hh, hc, data.nbins, g_tot, h_tot, min_data_in_leaf)
        if gain > 0.0:
            node_split[nid] = (gain, j, b)
        return gain

    root = new_node(np.asarray(rows, dtype=np.int64), 0)
    heap: list[tuple[float, int, int]] = []
    counter = 0
    g0 = evaluate(root)
    if g0 > 0.0:
        heapq.heappush(heap, (-g0, counter, root))
        counter += 1
    n_leaves = 1
    while heap and n_leaves < num_leaves:
        _, _, nid = heapq.heappop(heap)
        _, j, b = node_split.pop(nid)
        rows_n = node_rows.pop(nid)
        mask = data.binned[j, rows_n] <= b
        rows_l, rows_r = rows_n[mask], rows_n[~mask]
        feature[nid] = j
        bin_thr[nid] = b
        thr[nid] = float(data.edges[j][b])
        left[nid] = new_node(rows_l, depth[nid] + 1)
        right[nid] = new_node(rows_r, depth[nid] + 1)
        n_leaves += 1
        for child in (left[nid], right[nid]):
            g = evaluate(child)
            if g > 0.0:
                heapq.heappush(heap, (-g, counter, child))
                counter += 1

    value = np.zeros(len(feature))
    for nid in range(len(feature)):
        if feature[nid] < 0:
            g, h = node_gh[nid]
            value[nid] = _leaf_value(g, h, l1)
    return Tree(
        feature=np.asarray(feature, dtype=np.int32),
        bin_threshold=np.asarray(bin_thr, dtype=np.int32),
        threshold=np.asarray(thr, dtype=float),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        value=value,
    )
