"""Stage-wise gradient boosting over histogram trees.

Each iteration fits one tree to the per-row (gradient, Hessian) of the
current predictions, shrinks its leaf values by the learning rate and adds
it to the ensemble.  With full bagging a backtracking safeguard keeps the
training loss non-increasing by construction: a step that raises the loss
is first halved as a whole, and if no global scale works the individual
leaves pushing samples past the current worst-case level are zeroed out so
the remaining leaves can still contribute.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..backend import get_kernels
from ..core import ConfigError, DomainError, make_rng
from .losses import LossSpec, make_loss
from .trees import Tree, bin_features, grow_tree

#: Per-step slack allowed by the monotone-loss safeguard.
_MONOTONE_TOL = 1e-13


class TrainingError(RuntimeError):
    """Non-finite loss encountered during boosting."""

    def __init__(self, iteration: int, message: str):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration


@dataclass(frozen=True)
class GbmParams:
    learning_rate: float = 0.1
    iterations: int = 100
    max_depth: int = 5
    num_leaves: int = 16
    bagging_fraction: float = 1.0
    min_data_in_leaf: int = 20
    l1_regularization: float = 0.0
    histogram_bins: int = 255

    def __post_init__(self):
        if not 0 < self.learning_rate <= 1:
            raise ConfigError("learning_rate must be in (0, 1]")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.max_depth < 1:
            raise ConfigError("max_depth must be >= 1")
        if self.num_leaves < 2:
            raise ConfigError("num_leaves must be >= 2")
        if not 0 < self.bagging_fraction <= 1:
            raise ConfigError("bagging_fraction must be in (0, 1]")
        if self.min_data_in_leaf < 1:
            raise ConfigError("min_data_in_leaf must be >= 1")
        if self.l1_regularization < 0:
            raise ConfigError("l1_regularization must be >= 0")
        if self.histogram_bins < 2:
            raise ConfigError("histogram_bins must be >= 2")


@dataclass
class GbmModel:
    """Additive ensemble: F0 plus shrunken leaf values along the tree list."""

    f0: float
    trees: list[Tree]
    params: GbmParams
    loss_spec: LossSpec
    n_features: int
    train_loss_curve: np.ndarray = field(default_factory=lambda: np.empty(0))
    _forest_cache: tuple | None = field(default=None, repr=False, compare=False)

    def _forest(self):
        if self._forest_cache is None:
            if self.trees:
                offsets = np.zeros(len(self.trees) + 1, dtype=np.int64)
                for t, tree in enumerate(self.trees):
                    offsets[t + 1] = offsets[t] + tree.n_nodes
                feat = np.concatenate([t.feature for t in self.trees])
                thr = np.concatenate([t.threshold for t in self.trees])
                val = np.concatenate([t.value for t in self.trees])
                left = np.concatenate(
                    [t.left + off for t, off in zip(self.trees, offsets[:-1])]
                ).astype(np.int32)
                right = np.concatenate(
                    [t.right + off for t, off in zip(self.trees, offsets[:-1])]
                ).astype(np.int32)
                # child index -1 + offset would alias other trees' nodes;
                # leaves are never descended so redirect them to themselves
                leaf = feat < 0
                idx = np.arange(feat.size, dtype=np.int32)
                left[leaf] = idx[leaf]
                right[leaf] = idx[leaf]
            else:
                offsets = np.zeros(1, dtype=np.int64)
                feat = np.empty(0, dtype=np.int32)
                thr = val = np.empty(0)
                left = right = np.empty(0, dtype=np.int32)
            self._forest_cache = (feat, thr, left, right, val, offsets)
        return self._forest_cache

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(np.atleast_2d(np.asarray(X, dtype=float)))
        if X.shape[1] != self.n_features:
            raise DomainError(
                f"model expects {self.n_features} features, got {X.shape[1]}"
            )
        feat, thr, left, right, val, offsets = self._forest()
        return get_kernels().predict_forest(X, feat, thr, left, right, val, offsets, self.f0)


def _backtrack(values, leaf_idx, pred, y, loss, prev_loss, tol):
    """Largest acceptable damped version of a tree's leaf values.

    At each scale (1, 1/2, ... down to about 1e-3) the leaf containing the
    worst still-active sample (largest post-step loss among samples whose
    leaf has not been zeroed yet) is zeroed until the loss stops
    increasing; the first scale with an acceptable non-trivial result
    wins.  Zeroing before shrinking keeps the bulk of a step that only a
    few leaves spoil; picking the worst *active* sample matters because at
    high sharpness the loss increase can come from near-worst samples in
    other leaves while the global worst sample's leaf is already zero.  If
    even that fails, the whole tree is shrunk geometrically as a last
    resort.  Returns (damped_values, new_loss) or (None, prev_loss) when
    no non-trivial damping is acceptable.
    """
    scale = 1.0
    while scale >= 1e-3:
        vals = values * scale
        while True:
            active = vals[leaf_idx] != 0.0
            if not active.any():
                break
            c = vals[leaf_idx]
            new_loss = loss.value(pred + c, y)
            if new_loss <= prev_loss + tol:
                return vals, new_loss
            r = y - (pred + c)
            r2 = np.where(active, r * r, -np.inf)
            vals[leaf_idx[int(np.argmax(r2))]] = 0.0
        scale *= 0.5
    contrib = values[leaf_idx]
    scale = 0.5e-3
    while scale >= 1e-10:
        new_loss = loss.value(pred + contrib * scale, y)
        if new_loss <= prev_loss + tol:
            return values * scale, new_loss
        scale *= 0.5
    return None, prev_loss


def fit_gbm(
    X: np.ndarray,
    y: np.ndarray,
    params: GbmParams,
    loss_spec: LossSpec,
    seed: int,
) -> GbmModel:
    """Train a boosted ensemble; deterministic given (X, y, params, seed)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.size:
        raise DomainError("X must be (H, m) and y (H,) with matching H")
    H = X.shape[0]
    if H < params.min_data_in_leaf:
        raise DomainError("need at least min_data_in_leaf training rows")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise DomainError("training data contains non-finite entries")

    data = bin_features(X, params.histogram_bins)
    loss = make_loss(loss_spec)
    f0 = loss.initial_prediction(y)
    pred = np.full(H, f0)
    all_rows = np.arange(H, dtype=np.int64)
    n_bag = max(1, int(params.bagging_fraction * H))
    full_bagging = params.bagging_fraction >= 1.0

    trees: list[Tree] = []
    curve = np.empty(params.iterations + 1)
    prev_loss = loss.value(pred, y)
    curve[0] = prev_loss
    filled = 0
    for p in range(params.iterations):
        if not np.isfinite(prev_loss):
            raise TrainingError(p, f"non-finite training loss {prev_loss}")
        if full_bagging:
            rows = all_rows
        else:
            rng = make_rng(seed, "bagging", p)
            rows = np.sort(rng.choice(H, size=n_bag, replace=False)).astype(np.int64)
        grad, hess = loss.grad_hess(pred, y)
        tree = grow_tree(
            data,
            rows,
            grad,
            hess,
            max_depth=params.max_depth,
            num_leaves=params.num_leaves,
            min_data_in_leaf=params.min_data_in_leaf,
            l1=params.l1_regularization,
        )
        tree.scale_values(params.learning_rate)
        leaf_idx = tree.route_rows(data.binned)
        contrib = tree.value[leaf_idx]
        new_loss = loss.value(pred + contrib, y)
        if full_bagging:
            tol = _MONOTONE_TOL * max(1.0, abs(prev_loss))
            if new_loss > prev_loss + tol:
                if hasattr(loss, "notify_safeguard"):
                    loss.notify_safeguard()
                vals, new_loss = _backtrack(
                    tree.value, leaf_idx, pred, y, loss, prev_loss, tol
                )
                if vals is None:
                    # no acceptable step exists for this gradient.  If the
                    # loss supports it, relax the sharpness so the next
                    # gradient works on the remaining samples; otherwise the
                    # same tree would repeat forever, so stop.
                    if getattr(loss, "relax", 0.0) > 1e-6:
                        loss.relax *= 0.5
                        curve[p + 1] = prev_loss
                        filled = p + 1
                        continue
                    break
                tree.value = vals
                contrib = vals[leaf_idx]
            if hasattr(loss, "relax"):
                loss.relax = min(1.0, loss.relax * 2.0)
        pred = pred + contrib
        trees.append(tree)
        prev_loss = new_loss
        curve[p + 1] = prev_loss
        filled = p + 1

    model = GbmModel(
        f0=f0,
        trees=trees,
        params=params,
        loss_spec=loss_spec,
        n_features=X.shape[1],
        train_loss_curve=curve[: filled + 1].copy(),
    )
    model.training_predictions_ = pred
    return model


def predict_gbm(model: GbmModel, X: np.ndarray) -> np.ndarray:
    return model.predict(X)
