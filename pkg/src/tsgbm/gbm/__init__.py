from .boosting import GbmModel, GbmParams, TrainingError, fit_gbm, predict_gbm
from .losses import (
    LossSpec,
    logsumexp,
    make_loss,
    softmax_minimax_grad_hess,
    softmax_weights,
)
from .serialize import (
    MODEL_FORMAT_VERSION,
    model_from_dict,
    model_from_text,
    model_to_dict,
    model_to_text,
)
from .trees import BinnedData, Tree, bin_features, grow_tree

__all__ = [
    "GbmModel",
    "GbmParams",
    "TrainingError",
    "fit_gbm",
    "predict_gbm",
    "LossSpec",
    "logsumexp",
    "make_loss",
    "softmax_minimax_grad_hess",
    "softmax_weights",
    "MODEL_FORMAT_VERSION",
    "model_from_dict",
    "model_from_text",
    "model_to_dict",
    "model_to_text",
    "BinnedData",
    "Tree",
    "bin_features",
    "grow_tree",
]
