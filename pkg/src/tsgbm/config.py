"""Declarative experiment configuration and run manifests.

A config file (YAML) fully determines a train/evaluate run: mechanism,
prior bounds, compressor, feature degree, GBM parameters, loss, sample
counts and the master seed.  Unknown keys are rejected so typos fail
loudly.  The config fingerprint (SHA-256 of the canonical serialized
form) ties every output file to the exact configuration that produced it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np
import yaml

from .compression import CompressorSpec
from .core import RNG_ALGORITHM, ConfigError, ParameterSpace
from .gbm import GbmParams, LossSpec
from .simulators import MechanismSpec, PriorSpec

TOOL_VERSION = "0.1.0"

_TOP_KEYS = {
    "name",
    "mechanism",
    "prior",
    "compressor",
    "feature_degree",
    "gbm",
    "loss",
    "M_train",
    "M_test",
    "MC",
    "theta_test",
    "master_seed",
}
_MECHANISM_KEYS = {"kind", "N"}
_COMPRESSOR_KEYS = {"kind", "n", "include_intercept", "log_square", "weibull_plot_fit"}
_GBM_KEYS = {
    "learning_rate",
    "iterations",
    "max_depth",
    "num_leaves",
    "bagging_fraction",
    "min_data_in_leaf",
    "l1_regularization",
    "histogram_bins",
}
_LOSS_KEYS = {"kind", "K", "bulk_weight"}


def _check_keys(mapping: dict, allowed: set, where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown config key(s) in {where}: {sorted(unknown)}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment bit-for-bit."""

    name: str
    mechanism: MechanismSpec
    prior: PriorSpec
    compressor: CompressorSpec
    feature_degree: int
    gbm: GbmParams
    loss: LossSpec
    M_train: int
    M_test: int
    MC: int
    theta_test: tuple[tuple[float, ...], ...]
    master_seed: int

    def __post_init__(self):
        if self.feature_degree not in (1, 2):
            raise ConfigError("feature_degree must be 1 or 2")
        if min(self.M_train, self.M_test, self.MC) < 1:
            raise ConfigError("M_train, M_test and MC must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be a u64")
        d = self.mechanism.dims
        if self.prior.space.dims != d:
            raise ConfigError(
                f"prior has {self.prior.space.dims} dims, mechanism needs {d}"
            )
        for row in self.theta_test:
            if len(row) != d:
                raise ConfigError(f"theta_test row {row} is not {d}-dimensional")
        if isinstance(self.loss.bulk_weight, tuple) and len(self.loss.bulk_weight) != d:
            raise ConfigError(
                f"loss.bulk_weight has {len(self.loss.bulk_weight)} entries, "
                f"mechanism needs {d}"
            )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "mechanism": {"kind": self.mechanism.kind, "N": self.mechanism.N},
            "prior": {
                "lo": self.prior.space.lo.tolist(),
                "hi": self.prior.space.hi.tolist(),
            },
            "compressor": {
                "kind": self.compressor.kind,
                "n": self.compressor.n,
                "include_intercept": self.compressor.include_intercept,
                "log_square": self.compressor.log_square,
                "weibull_plot_fit": self.compressor.weibull_plot_fit,
            },
            "feature_degree": self.feature_degree,
            "gbm": {
                "learning_rate": self.gbm.learning_rate,
                "iterations": self.gbm.iterations,
                "max_depth": self.gbm.max_depth,
                "num_leaves": self.gbm.num_leaves,
                "bagging_fraction": self.gbm.bagging_fraction,
                "min_data_in_leaf": self.gbm.min_data_in_leaf,
                "l1_regularization": self.gbm.l1_regularization,
                "histogram_bins": self.gbm.histogram_bins,
            },
            "loss": {
                "kind": self.loss.kind,
                "K": self.loss.K,
                "bulk_weight": list(self.loss.bulk_weight)
                if isinstance(self.loss.bulk_weight, tuple)
                else self.loss.bulk_weight,
            },
            "M_train": self.M_train,
            "M_test": self.M_test,
            "MC": self.MC,
            "theta_test": [list(row) for row in self.theta_test],
            "master_seed": self.master_seed,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a mapping")
        _check_keys(raw, _TOP_KEYS, "config")
        try:
            mech_raw = dict(raw["mechanism"])
            prior_raw = dict(raw["prior"])
            comp_raw = dict(raw["compressor"])
            gbm_raw = dict(raw["gbm"])
            loss_raw = dict(raw["loss"])
        except KeyError as exc:
            raise ConfigError(f"missing config section {exc}") from exc
        _check_keys(mech_raw, _MECHANISM_KEYS, "mechanism")
        _check_keys(prior_raw, {"lo", "hi"}, "prior")
        _check_keys(comp_raw, _COMPRESSOR_KEYS, "compressor")
        _check_keys(gbm_raw, _GBM_KEYS, "gbm")
        _check_keys(loss_raw, _LOSS_KEYS, "loss")
        space = ParameterSpace(
            np.asarray(prior_raw["lo"], dtype=float),
            np.asarray(prior_raw["hi"], dtype=float),
        )
        theta_test = tuple(
            tuple(float(v) for v in row) for row in raw.get("theta_test", [])
        )
        return cls(
            name=str(raw.get("name", "unnamed")),
            mechanism=MechanismSpec(kind=mech_raw["kind"], N=int(mech_raw["N"])),
            prior=PriorSpec(space),
            compressor=CompressorSpec(
                kind=comp_raw["kind"],
                n=int(comp_raw["n"]),
                include_intercept=bool(comp_raw.get("include_intercept", False)),
                log_square=bool(comp_raw.get("log_square", False)),
                weibull_plot_fit=bool(comp_raw.get("weibull_plot_fit", False)),
            ),
            feature_degree=int(raw.get("feature_degree", 2)),
            gbm=GbmParams(
                learning_rate=float(gbm_raw.get("learning_rate", 0.1)),
                iterations=int(gbm_raw.get("iterations", 100)),
                max_depth=int(gbm_raw.get("max_depth", 5)),
                num_leaves=int(gbm_raw.get("num_leaves", 16)),
                bagging_fraction=float(gbm_raw.get("bagging_fraction", 1.0)),
                min_data_in_leaf=int(gbm_raw.get("min_data_in_leaf", 20)),
                l1_regularization=float(gbm_raw.get("l1_regularization", 0.0)),
                histogram_bins=int(gbm_raw.get("histogram_bins", 255)),
            ),
            loss=LossSpec(
                kind=loss_raw["kind"],
                K=float(loss_raw.get("K", 1e3)),
                bulk_weight=loss_raw.get("bulk_weight", 0.0),
            ),
            M_train=int(raw["M_train"]),
            M_test=int(raw.get("M_test", 1000)),
            MC=int(raw.get("MC", 1000)),
            theta_test=theta_test,
            master_seed=int(raw["master_seed"]),
        )

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    @classmethod
    def from_yaml(cls, text: str) -> "ExperimentConfig":
        try:
            raw = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        return cls.from_dict(raw)

    def fingerprint(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


@dataclass
class RunManifest:
    """Provenance record written next to every set of output files."""

    config_fingerprint: str
    tool_version: str = TOOL_VERSION
    rng_algorithm: str = RNG_ALGORITHM
    wall_clock_seconds: float = 0.0
    stage_seconds: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config_fingerprint": self.config_fingerprint,
            "tool_version": self.tool_version,
            "rng_algorithm": self.rng_algorithm,
            "wall_clock_seconds": self.wall_clock_seconds,
            "stage_seconds": dict(self.stage_seconds),
        }

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_text(cls, text: str) -> "RunManifest":
        d = json.loads(text)
        return cls(
            config_fingerprint=d["config_fingerprint"],
            tool_version=d.get("tool_version", TOOL_VERSION),
            rng_algorithm=d.get("rng_algorithm", RNG_ALGORITHM),
            wall_clock_seconds=float(d.get("wall_clock_seconds", 0.0)),
            stage_seconds=dict(d.get("stage_seconds", {})),
        )
