"""Versioned text (JSON) serialization of boosted models.

Round-trips exactly: floats are emitted via Python ``repr`` (shortest
representation that parses back to the identical double).
"""

from __future__ import annotations

import json
from dataclasses import asdict

import numpy as np

from ..core import ConfigError
from .boosting import GbmModel, GbmParams
from .losses import LossSpec
from .trees import Tree

MODEL_FORMAT_VERSION = "tsgbm-model-v1"


def _tree_to_dict(tree: Tree) -> dict:
    return {
        "feature": tree.feature.tolist(),
        "bin_threshold": tree.bin_threshold.tolist(),
        "threshold": tree.threshold.tolist(),
        "left": tree.left.tolist(),
        "right": tree.right.tolist(),
        "value": tree.value.tolist(),
    }


def _tree_from_dict(d: dict) -> Tree:
    return Tree(
        feature=np.asarray(d["feature"], dtype=np.int32),
        bin_threshold=np.asarray(d["bin_threshold"], dtype=np.int32),
        threshold=np.asarray(d["threshold"], dtype=float),
        left=np.asarray(d["left"], dtype=np.int32),
        right=np.asarray(d["right"], dtype=np.int32),
        value=np.asarray(d["value"], dtype=float),
    )


def model_to_dict(model: GbmModel) -> dict:
    return {
        "format": MODEL_FORMAT_VERSION,
        "f0": model.f0,
        "n_features": model.n_features,
        "params": asdict(model.params),
        "loss": {
            "kind": model.loss_spec.kind,
            "K": model.loss_spec.K,
            "bulk_weight": model.loss_spec.bulk_weight,
        },
        "trees": [_tree_to_dict(t) for t in model.trees],
    }


def model_from_dict(d: dict) -> GbmModel:
    if d.get("format") != MODEL_FORMAT_VERSION:
        raise ConfigError(f"unsupported model format {d.get('format')!r}")
    return GbmModel(
        f0=float(d["f0"]),
        trees=[_tree_from_dict(t) for t in d["trees"]],
        params=GbmParams(**d["params"]),
        loss_spec=LossSpec(**d["loss"]),
        n_features=int(d["n_features"]),
    )


def model_to_text(model: GbmModel) -> str:
    return json.dumps(model_to_dict(model), indent=1)


def model_from_text(text: str) -> GbmModel:
    return model_from_dict(json.loads(text))
