"""Minimax two-stage gradient boosting estimator.

Simulate a parametric data mechanism, compress each observation sequence
to low-dimensional statistics, expand nonlinear features and fit one
gradient-boosted tree ensemble per parameter dimension under a soft-max
approximation of the minimax (worst-case squared error) risk.
"""

from .compression import (
    CompressorSpec,
    ar_fit,
    compress,
    log_square_transform,
    monomial_feature_count,
    monomial_features,
    quantiles,
    weibull_plot_fit,
)
from .config import ExperimentConfig, RunManifest
from .core import (
    ConfigError,
    DomainError,
    ObservationSequence,
    ParameterSpace,
    ParameterVector,
    SeedPolicy,
    derive_substream_seed,
    make_rng,
)
from .gbm import GbmModel, GbmParams, LossSpec, fit_gbm, predict_gbm
from .pipeline import (
    MseReport,
    TsgbmEstimator,
    build_training_set,
    evaluate_mse,
    scatter_eval,
    train_tsgbm,
    weibull_crlb,
)
from .simulators import (
    MechanismSpec,
    PriorSpec,
    sample_prior,
    simulate,
    state_space_simulate,
    stoch_vol_simulate,
    weibull_sample,
)

__version__ = "0.1.0"

__all__ = [
    "CompressorSpec",
    "ar_fit",
    "compress",
    "log_square_transform",
    "monomial_feature_count",
    "monomial_features",
    "quantiles",
    "weibull_plot_fit",
    "ExperimentConfig",
    "RunManifest",
    "ConfigError",
    "DomainError",
    "ObservationSequence",
    "ParameterSpace",
    "ParameterVector",
    "SeedPolicy",
    "derive_substream_seed",
    "make_rng",
    "GbmModel",
    "GbmParams",
    "LossSpec",
    "fit_gbm",
    "predict_gbm",
    "MseReport",
    "TsgbmEstimator",
    "build_training_set",
    "evaluate_mse",
    "scatter_eval",
    "train_tsgbm",
    "weibull_crlb",
    "MechanismSpec",
    "PriorSpec",
    "sample_prior",
    "simulate",
    "state_space_simulate",
    "stoch_vol_simulate",
    "weibull_sample",
    "__version__",
]
