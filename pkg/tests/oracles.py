"""Independent reference implementations used to cross-check the library.

Everything here is written for clarity, not speed: exhaustive split
enumeration over raw feature values, explicit python loops, no histogram
binning.  On datasets where every feature has fewer distinct values than
the histogram bin budget the library's binned trees must agree with these
oracles to floating-point roundoff.
"""

from __future__ import annotations

import numpy as np

_EPS = 1e-12  # same denominator regularizer as the library's leaf solve


def naive_leaf_value(g_sum: float, h_sum: float, l1: float) -> float:
    mag = max(abs(g_sum) - l1, 0.0)
    return -np.sign(g_sum) * mag / (h_sum + _EPS)


class _NaiveNode:
    def __init__(self, rows: np.ndarray, depth: int):
        self.rows = rows
        self.depth = depth
        self.feature = -1
        self.threshold = 0.0
        self.left: "_NaiveNode | None" = None
        self.right: "_NaiveNode | None" = None
        self.value = 0.0


def _score(g: float, h: float) -> float:
    return g * g / (h + _EPS)


def _best_split_exhaustive(X, rows, grad, hess, min_leaf):
    """Highest-gain (feature, midpoint threshold) split of one node.

    Candidates are scanned in (feature index, threshold) order and a new
    best is only adopted on strictly greater gain, so ties resolve to the
    lowest feature then the lowest threshold.
    """
    g_tot = grad[rows].sum()
    h_tot = hess[rows].sum()
    parent = _score(g_tot, h_tot)
    best = (0.0, -1, 0.0)
    for j in range(X.shape[1]):
        col = X[rows, j]
        for cut in np.unique(col)[:-1]:
            left = rows[col <= cut]
            right = rows[col > cut]
            if len(left) < min_leaf or len(right) < min_leaf:
                continue
            gl, hl = grad[left].sum(), hess[left].sum()
            gain = _score(gl, hl) + _score(g_tot - gl, h_tot - hl) - parent
            if gain > best[0]:
                uniq = np.unique(col)
                nxt = uniq[np.searchsorted(uniq, cut) + 1]
                best = (gain, j, 0.5 * (cut + nxt))
    return best


def naive_tree(X, grad, hess, *, max_depth, num_leaves, min_data_in_leaf, l1):
    """Grow one regression tree best-first by exhaustive split search."""
    root = _NaiveNode(np.arange(X.shape[0]), 0)
    leaves = [root]
    candidates = {}  # node -> (gain, feature, threshold)

    def consider(node):
        if node.depth >= max_depth or node.rows.size < 2 * min_data_in_leaf:
            return
        gain, j, thr = _best_split_exhaustive(
            X, node.rows, grad, hess, min_data_in_leaf
        )
        if gain > 0.0:
            candidates[id(node)] = (gain, j, thr, node)

    consider(root)
    while candidates and len(leaves) < num_leaves:
        # first-inserted wins ties: dicts preserve insertion order and the
        # comparison below is strict
        best = None
        for gain, j, thr, node in candidates.values():
            if best is None or gain > best[0]:
                best = (gain, j, thr, node)
        gain, j, thr, node = best
        del candidates[id(node)]
        mask = X[node.rows, j] <= thr
        node.feature = j
        node.threshold = thr
        node.left = _NaiveNode(node.rows[mask], node.depth + 1)
        node.right = _NaiveNode(node.rows[~mask], node.depth + 1)
        leaves.remove(node)
        leaves += [node.left, node.right]
        consider(node.left)
        consider(node.right)

    for leaf in leaves:
        leaf.value = naive_leaf_value(grad[leaf.rows].sum(), hess[leaf.rows].sum(), l1)
    return root


def naive_tree_predict(node: _NaiveNode, x: np.ndarray) -> float:
    while node.feature >= 0:
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node.value


def naive_gbm_squared(X, y, *, learning_rate, iterations, max_depth, num_leaves,
                      min_data_in_leaf, l1):
    """Reference boosting under mean squared error, full bagging.

    Returns the final per-row training predictions.
    """
    pred = np.full(y.size, y.mean())
    for _ in range(iterations):
        grad = 2.0 * (pred - y)
        hess = np.full(y.size, 2.0)
        root = naive_tree(
            X,
            grad,
            hess,
            max_depth=max_depth,
            num_leaves=num_leaves,
            min_data_in_leaf=min_data_in_leaf,
            l1=l1,
        )
        step = np.array([naive_tree_predict(root, X[i]) for i in range(y.size)])
        pred = pred + learning_rate * step
    return pred


def naive_quantiles(samples: np.ndarray, n: int) -> np.ndarray:
    """Quantiles at k/(n+1) by direct order-statistic interpolation."""
    s = np.sort(np.asarray(samples, dtype=float))
    out = np.empty(n)
    for k in range(1, n + 1):
        pos = (k / (n + 1)) * (s.size - 1)
        lo = int(np.floor(pos))
        hi = min(lo + 1, s.size - 1)
        frac = pos - lo
        out[k - 1] = (1.0 - frac) * s[lo] + frac * s[hi]
    return out


def naive_ar_lstsq(samples: np.ndarray, n: int, include_intercept: bool):
    """AR(n) coefficients via an explicitly assembled lag matrix + lstsq."""
    s = np.asarray(samples, dtype=float)
    rows = []
    target = []
    for k in range(n, s.size):
        lags = [s[k - 1 - i] for i in range(n)]
        rows.append(([1.0] if include_intercept else []) + lags)
        target.append(s[k])
    coef, *_ = np.linalg.lstsq(np.asarray(rows), np.asarray(target), rcond=None)
    return coef


def naive_monomials(alpha: np.ndarray, degree: int) -> np.ndarray:
    """Monomial expansion in the library's documented order."""
    a = np.asarray(alpha, dtype=float)
    feats = list(a)
    if degree == 2:
        feats += [v * v for v in a]
        for i in range(a.size):
            for j in range(i + 1, a.size):
                feats.append(a[i] * a[j])
    return np.asarray(feats)


def naive_softmax_value(losses: np.ndarray, K: float) -> float:
    """ln(sum exp(K L_i))/K via 50-digit arithmetic (no max shift)."""
    from mpmath import mp

    with mp.workdps(50):
        total = mp.mpf(0)
        for v in losses:
            total += mp.e ** (mp.mpf(K) * mp.mpf(float(v)))
        return float(mp.log(total) / K)
