from .mlp import MlpParams, forward, init_params
from .loss import composite_loss, data_loss
from .ensemble import (
    EnsembleModel,
    SharedBlock,
    apply_block,
    block_average,
    ensemble_predict,
    train_steps,
)
from .metrics import r2_score
from .checkpoint import load_ensemble, load_trace, save_ensemble, save_trace

__all__ = [
    "MlpParams",
    "init_params",
    "forward",
    "data_loss",
    "composite_loss",
    "EnsembleModel",
    "SharedBlock",
    "block_average",
    "apply_block",
    "ensemble_predict",
    "train_steps",
    "r2_score",
    "save_ensemble",
    "load_ensemble",
    "save_trace",
    "load_trace",
]
