"""First-stage compression: sequence -> low-dimensional statistics.

Two compressor families are supported: empirical quantiles (for i.i.d.
mechanisms) and least-squares AR(n) coefficients (for dynamical systems),
optionally preceded by the log-square transform that turns multiplicative
observation noise into additive noise.  A quadratic monomial expansion
provides the nonlinear features fed to the second stage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .core import ConfigError, DomainError, ObservationSequence

COMPRESSOR_KINDS = ("quantiles", "ar_coeffs")


class DegenerateFitError(ValueError):
    """The AR regressor matrix is rank deficient."""

    def __init__(self, rank: int, needed: int):
        super().__init__(f"degenerate AR fit: regressor rank {rank} < {needed}")
        self.rank = rank
        self.needed = needed


@dataclass(frozen=True)
class CompressorSpec:
    """How to map a length-N sequence to n statistics.

    ``log_square`` applies ln(y^2) before compressing (stochastic
    volatility); ``include_intercept`` only applies to ``ar_coeffs``;
    ``weibull_plot_fit`` appends the two probability-plot parameter
    estimates of :func:`weibull_plot_fit` to the quantile vector.
    """

    kind: str
    n: int
    include_intercept: bool = False
    log_square: bool = False
    weibull_plot_fit: bool = False

    def __post_init__(self):
        if self.kind not in COMPRESSOR_KINDS:
            raise ConfigError(f"unknown compressor kind {self.kind!r}")
        if self.n < 1:
            raise ConfigError("compressed dimension n must be >= 1")
        if self.kind == "quantiles" and self.include_intercept:
            raise ConfigError("include_intercept only applies to ar_coeffs")
        if self.weibull_plot_fit and self.kind != "quantiles":
            raise ConfigError("weibull_plot_fit only applies to quantiles")
        if self.weibull_plot_fit and self.n < 2:
            raise ConfigError("weibull_plot_fit needs at least 2 quantiles")

    @property
    def output_dim(self) -> int:
        if self.kind == "ar_coeffs":
            return self.n + (1 if self.include_intercept else 0)
        return self.n + (2 if self.weibull_plot_fit else 0)


def quantiles(y: ObservationSequence | np.ndarray, n: int) -> np.ndarray:
    """Empirical quantiles at probabilities k/(n+1), k=1..n.

    Computed from sorted order statistics with linear interpolation; the
    output is nondecreasing.
    """
    samples = y.samples if isinstance(y, ObservationSequence) else np.asarray(y, dtype=float)
    if samples.size == 0:
        raise DomainError("cannot take quantiles of an empty sequence")
    if not 1 <= n <= samples.size:
        raise DomainError(f"need 1 <= n <= N, got n={n}, N={samples.size}")
    probs = np.arange(1, n + 1) / (n + 1)
    return np.quantile(samples, probs, method="linear")


def _plot_fit_projector(n: int) -> np.ndarray:
    """GLS projector for the log-log Weibull probability plot.

    For quantile probabilities p_k = k/(n+1) the plot regresses ln q_k on
    (1, ln(-ln(1-p_k))); the slope is 1/shape and the intercept ln(scale).
    The regression errors (asymptotic order-statistic noise) have
    covariance proportional to min(p_i,p_j)(1-max(p_i,p_j)) divided by
    (1-p_i)c_i(1-p_j)c_j with c = -ln(1-p) -- the shape parameter factors
    out -- so the efficient weighting is parameter-free and the projector
    can be precomputed from n alone.
    """
    p = np.arange(1, n + 1) / (n + 1)
    c = -np.log(1.0 - p)
    design = np.column_stack([np.ones(n), np.log(c)])
    d = (1.0 - p) * c
    cov = np.minimum.outer(p, p) * (1.0 - np.maximum.outer(p, p)) / np.outer(d, d)
    weighted = np.linalg.solve(cov, design)
    return np.linalg.solve(design.T @ weighted, weighted.T)


def weibull_plot_fit(q: np.ndarray, n: int | None = None) -> np.ndarray:
    """(scale, shape) estimates from a weighted Weibull probability plot.

    ``q`` holds empirical quantiles at probabilities k/(n+1) as produced
    by :func:`quantiles`.  Returns (scale, shape) = (exp(intercept),
    1/slope) of the generalized-least-squares line through the log-log
    plot.  Quantiles must be positive; a non-positive slope (impossible in
    distribution, possible for pathological inputs) is a domain error.
    """
    q = np.asarray(q, dtype=float)
    if q.ndim != 1 or q.size < 2:
        raise DomainError("weibull_plot_fit needs at least 2 quantiles")
    if np.any(q <= 0.0):
        raise DomainError("weibull_plot_fit requires positive quantiles")
    if n is None:
        n = q.size
    intercept, slope = _plot_fit_projector(n) @ np.log(q)
    if not slope > 0.0:
        raise DomainError(f"non-positive probability-plot slope {slope}")
    return np.array([np.exp(intercept), 1.0 / slope])


def ar_fit(
    y: ObservationSequence | np.ndarray, n: int, include_intercept: bool = False
) -> np.ndarray:
    """Least-squares AR(n) coefficients of a sequence.

    Regresses y(k) on (1 if intercept, y(k-1), ..., y(k-n)) over
    k = n+1..N.  Solved by economy QR; a rank-deficient regressor matrix
    raises :class:`DegenerateFitError` with the deficient rank.  Returns
    the coefficient vector, intercept first when included.
    """
    samples = y.samples if isinstance(y, ObservationSequence) else np.asarray(y, dtype=float)
    N = samples.size
    if N <= 10 * n:
        raise DomainError(f"AR({n}) fit needs N > 10n, got N={N}")
    # lag matrix: row k-n-1 holds (y(k-1), ..., y(k-n))
    windows = np.lib.stride_tricks.sliding_window_view(samples, n)[:-1]
    X = windows[:, ::-1]
    if include_intercept:
        X = np.column_stack([np.ones(X.shape[0]), X])
    target = samples[n:]

    q, r = linalg.qr(X, mode="economic")
    diag = np.abs(np.diag(r))
    tol = max(X.shape) * np.finfo(float).eps * (diag.max() if diag.size else 0.0)
    rank = int(np.count_nonzero(diag > tol))
    if rank < X.shape[1]:
        raise DegenerateFitError(rank, X.shape[1])
    return linalg.solve_triangular(r, q.T @ target)


def log_square_transform(y: ObservationSequence) -> ObservationSequence:
    """ybar(k) = ln(y(k)^2); exact zeros are a domain error."""
    if np.any(y.samples == 0.0):
        raise DomainError("log-square transform undefined for zero samples")
    return ObservationSequence(np.log(y.samples * y.samples), mechanism_id=y.mechanism_id)


def monomial_feature_count(n: int, degree: int = 2) -> int:
    """Number of monomial features (no constant term)."""
    if degree == 1:
        return n
    if degree == 2:
        return 2 * n + n * (n - 1) // 2
    raise ConfigError(f"feature degree must be 1 or 2, got {degree}")


def monomial_features(alpha: np.ndarray, degree: int = 2) -> np.ndarray:
    """All monomials of the inputs up to ``degree``, excluding the constant.

    Fixed order: the n linear terms, then the n squares, then the pairwise
    products alpha_i*alpha_j for i < j in lexicographic order.  Accepts a
    single vector (n,) or a stacked matrix (M, n).
    """
    a = np.asarray(alpha, dtype=float)
    single = a.ndim == 1
    if single:
        a = a[None, :]
    n = a.shape[1]
    if n < 1:
        raise DomainError("feature expansion needs at least one input")
    if degree == 1:
        out = a.copy()
    else:
        if degree != 2:
            raise ConfigError(f"feature degree must be 1 or 2, got {degree}")
        iu, ju = np.triu_indices(n, k=1)
        out = np.concatenate([a, a * a, a[:, iu] * a[:, ju]], axis=1)
    return out[0] if single else out


def compress(spec: CompressorSpec, y: ObservationSequence) -> np.ndarray:
    """Apply one compressor spec to a sequence."""
    if spec.log_square:
        y = log_square_transform(y)
    if spec.kind == "quantiles":
        q = quantiles(y, spec.n)
        if spec.weibull_plot_fit:
            return np.concatenate([q, weibull_plot_fit(q, spec.n)])
        return q
    return ar_fit(y, spec.n, spec.include_intercept)
