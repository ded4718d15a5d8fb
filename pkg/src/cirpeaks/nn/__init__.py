"""Neural next-sample predictors: dense and LSTM autoencoder variants."""

from .gradcheck import grad_check
from .model import (
    Model,
    backward,
    backward_batch,
    build_model,
    forward,
    forward_batch,
    lstm_cell_step,
    predict_series,
    with_scaler,
)
from .model_io import load_model, save_model, spec_from_dict, spec_to_dict
from .spec import PRESET_NAMES, LayerSpec, ModelSpec, effective_layers, preset
from .train import TrainConfig, TrainHistory, train

__all__ = [
    "LayerSpec",
    "Model",
    "ModelSpec",
    "PRESET_NAMES",
    "TrainConfig",
    "TrainHistory",
    "backward",
    "backward_batch",
    "build_model",
    "effective_layers",
    "forward",
    "forward_batch",
    "grad_check",
    "load_model",
    "lstm_cell_step",
    "predict_series",
    "preset",
    "save_model",
    "spec_from_dict",
    "spec_to_dict",
    "train",
    "with_scaler",
]
