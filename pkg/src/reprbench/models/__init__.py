from .checkpoint import load_model, save_model
from .linear import LinearModel, fit_linear, predict_linear, solve_least_squares
from .networks import CNN, FCN, MLP10, Network, build_network
from .spec import Family, ModelSpec, TrainingConfig, default_family
from .training import (
    Normalization,
    TrainedModel,
    build_cnn,
    build_fcn,
    build_mlp10,
    build_model,
    predict,
    train_model,
)

__all__ = [
    "CNN", "FCN", "Family", "LinearModel", "MLP10", "ModelSpec", "Network",
    "Normalization", "TrainedModel", "TrainingConfig", "build_cnn", "build_fcn",
    "build_mlp10", "build_model", "build_network", "default_family", "fit_linear",
    "load_model", "predict", "predict_linear", "save_model", "solve_least_squares",
    "train_model",
]
