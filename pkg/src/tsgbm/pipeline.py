"""Training and evaluation of the two-stage boosted estimator.

Training draws parameters from the proposal, simulates one sequence per
draw, compresses each to statistics, expands monomial features and fits
one boosted model per parameter dimension.  Evaluation replays fresh
simulator draws at a fixed true parameter and accumulates per-dimension
squared errors.  A numerically integrated Weibull Fisher information
provides the Cramer-Rao reference bounds.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .compression import (
    CompressorSpec,
    compress,
    monomial_feature_count,
    monomial_features,
)
from .core import (
    DomainError,
    ObservationSequence,
    ParameterVector,
    derive_substream_seed,
)
from .gbm import GbmModel, GbmParams, LossSpec, fit_gbm
from .gbm.serialize import model_from_dict, model_to_dict
from .simulators import MechanismSpec, PriorSpec, sample_prior, simulate

logger = logging.getLogger(__name__)

ESTIMATOR_FORMAT_VERSION = "tsgbm-estimator-v1"

#: Fraction of failed training samples tolerated before aborting.
MAX_FAILURE_FRACTION = 1e-3


class TrainingDataError(RuntimeError):
    """Too many simulation/compression failures during training."""

    def __init__(self, failed_thetas: list[np.ndarray]):
        super().__init__(
            f"{len(failed_thetas)} training samples failed simulation or compression"
        )
        self.failed_thetas = failed_thetas


@dataclass
class TsgbmEstimator:
    """Composed estimator: compression, feature expansion, per-dim models."""

    mechanism: MechanismSpec
    compressor: CompressorSpec
    feature_degree: int
    models: list[GbmModel]

    @property
    def dims(self) -> int:
        return len(self.models)

    @property
    def param_names(self) -> tuple[str, ...]:
        return self.mechanism.param_names

    def features(self, y: ObservationSequence) -> np.ndarray:
        return monomial_features(compress(self.compressor, y), self.feature_degree)

    def estimate(self, y: ObservationSequence) -> np.ndarray:
        phi = self.features(y)[None, :]
        return np.array([m.predict(phi)[0] for m in self.models])

    def estimate_vector(self, y: ObservationSequence) -> ParameterVector:
        return ParameterVector(self.estimate(y), self.param_names)

    def estimate_from_features(self, phi: np.ndarray) -> np.ndarray:
        """Batch prediction over pre-expanded feature rows, shape (M, d)."""
        return np.column_stack([m.predict(phi) for m in self.models])

    def to_dict(self) -> dict:
        return {
            "format": ESTIMATOR_FORMAT_VERSION,
            "mechanism": {"kind": self.mechanism.kind, "N": self.mechanism.N},
            "compressor": {
                "kind": self.compressor.kind,
                "n": self.compressor.n,
                "include_intercept": self.compressor.include_intercept,
                "log_square": self.compressor.log_square,
                "weibull_plot_fit": self.compressor.weibull_plot_fit,
            },
            "feature_degree": self.feature_degree,
            "models": [model_to_dict(m) for m in self.models],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TsgbmEstimator":
        if d.get("format") != ESTIMATOR_FORMAT_VERSION:
            raise DomainError(f"unsupported estimator format {d.get('format')!r}")
        return cls(
            mechanism=MechanismSpec(**d["mechanism"]),
            compressor=CompressorSpec(**d["compressor"]),
            feature_degree=int(d["feature_degree"]),
            models=[model_from_dict(m) for m in d["models"]],
        )

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_text(cls, text: str) -> "TsgbmEstimator":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class MseReport:
    theta: ParameterVector
    mse: np.ndarray  # per dimension
    mc: int
    master_seed: int


def _indexed_map(fn, count: int, threads: int) -> list:
    """Apply fn(i) for i in range(count); results ordered by index."""
    if threads <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, range(count)))


def _simulate_and_compress(
    mechanism: MechanismSpec,
    compressor: CompressorSpec,
    theta: np.ndarray,
    seed: int,
):
    y = simulate(mechanism, theta, seed)
    return compress(compressor, y)


def build_training_set(
    mechanism: MechanismSpec,
    prior: PriorSpec,
    compressor: CompressorSpec,
    feature_degree: int,
    M_train: int,
    master_seed: int,
    threads: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulate, compress and feature-expand M_train prior draws.

    Returns (phi, theta) with phi shape (M_kept, m).  Samples whose
    simulation or compression fails are dropped when rare (< 0.1%),
    otherwise a :class:`TrainingDataError` is raised.
    """
    thetas = sample_prior(prior, M_train, derive_substream_seed(master_seed, "prior", 0))

    def one(i):
        try:
            return _simulate_and_compress(
                mechanism,
                compressor,
                thetas[i],
                derive_substream_seed(master_seed, "sim", i),
            )
        except ValueError:
            return None

    alphas = _indexed_map(one, M_train, threads)
    failed = [thetas[i] for i, a in enumerate(alphas) if a is None]
    if len(failed) > MAX_FAILURE_FRACTION * M_train:
        raise TrainingDataError(failed)
    if failed:
        logger.warning("dropped %d failed training samples", len(failed))
        keep = [i for i, a in enumerate(alphas) if a is not None]
        thetas = thetas[keep]
        alphas = [alphas[i] for i in keep]
    alpha = np.vstack(alphas)
    return monomial_features(alpha, feature_degree), thetas


def train_tsgbm(
    mechanism: MechanismSpec,
    prior: PriorSpec,
    compressor: CompressorSpec,
    feature_degree: int,
    gbm: GbmParams,
    loss: LossSpec,
    M_train: int,
    master_seed: int,
    threads: int = 1,
) -> TsgbmEstimator:
    if M_train < 2 * gbm.min_data_in_leaf:
        raise DomainError("M_train must be at least 2*min_data_in_leaf")
    phi, thetas = build_training_set(
        mechanism, prior, compressor, feature_degree, M_train, master_seed, threads
    )

    def fit_dim(k):
        return fit_gbm(
            phi,
            thetas[:, k],
            gbm,
            loss.for_dimension(k),
            derive_substream_seed(master_seed, f"gbm-dim{k}", 0),
        )

    models = _indexed_map(fit_dim, mechanism.dims, min(threads, mechanism.dims))
    return TsgbmEstimator(
        mechanism=mechanism,
        compressor=compressor,
        feature_degree=feature_degree,
        models=models,
    )


def evaluate_mse(
    estimator,
    theta_test: ParameterVector,
    MC: int,
    master_seed: int,
    threads: int = 1,
) -> MseReport:
    """Monte Carlo MSE of an estimator at one true parameter value.

    ``estimator`` needs ``mechanism`` and ``estimate``; each replication
    simulates a fresh sequence with its own derived seed.
    """
    if MC < 1:
        raise DomainError("MC must be >= 1")
    truth = np.asarray(theta_test.values, dtype=float)

    def one(m):
        y = simulate(
            estimator.mechanism, truth, derive_substream_seed(master_seed, "eval", m)
        )
        err = estimator.estimate(y) - truth
        return err * err

    sq_errors = _indexed_map(one, MC, threads)
    total = np.zeros(truth.size)
    for e in sq_errors:
        total += e
    return MseReport(theta=theta_test, mse=total / MC, mc=MC, master_seed=master_seed)


def scatter_eval(
    estimator: TsgbmEstimator,
    prior: PriorSpec,
    M_test: int,
    master_seed: int,
    threads: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """(true, estimated) pairs over fresh prior draws; both shape (M, d)."""
    thetas = sample_prior(
        prior, M_test, derive_substream_seed(master_seed, "scatter-prior", 0)
    )

    def one(i):
        y = simulate(
            estimator.mechanism,
            thetas[i],
            derive_substream_seed(master_seed, "scatter-sim", i),
        )
        return estimator.estimate(y)

    estimates = np.vstack(_indexed_map(one, M_test, threads))
    return thetas, estimates


def _weibull_fisher_information(eta: float, gamma: float) -> np.ndarray:
    """Per-sample 2x2 Fisher information, by quadrature of score products.

    In terms of z = (y/eta)^gamma ~ Exp(1), the scores are
    s_eta = (gamma/eta)(z - 1) and s_gamma = (1 + (1-z)*ln z)/gamma.
    """

    def s_eta(z):
        return (gamma / eta) * (z - 1.0)

    def s_gamma(z):
        return (1.0 + (1.0 - z) * np.log(z)) / gamma

    def moment(f):
        val, _ = quad(lambda z: f(z) * np.exp(-z), 0.0, np.inf, limit=200)
        return val

    i_ee = moment(lambda z: s_eta(z) ** 2)
    i_gg = moment(lambda z: s_gamma(z) ** 2)
    i_eg = moment(lambda z: s_eta(z) * s_gamma(z))
    return np.array([[i_ee, i_eg], [i_eg, i_gg]])


def weibull_crlb(eta: float, gamma: float, N: int) -> tuple[float, float]:
    """Asymptotic Cramer-Rao lower bounds for N i.i.d. Weibull samples."""
    if eta <= 0 or gamma <= 0:
        raise DomainError("weibull_crlb requires eta > 0 and gamma > 0")
    if N < 1:
        raise DomainError("N must be >= 1")
    info = _weibull_fisher_information(eta, gamma)
    cov = np.linalg.inv(info)
    return float(cov[0, 0]) / N, float(cov[1, 1]) / N
