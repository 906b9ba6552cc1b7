"""
Estimators Package - closed-form formulas, linear regression, MLP
"""
from .formulas import bmi, clamp_bf, navy_bf_male, siri_bf
from .linear import (
    GradientDescentConfig,
    fit_gd,
    fit_ols,
    predict_linear,
    strongest_predictor,
)
from .early_stopping import EarlyStopping
from .neural import (
    TrainConfig,
    backprop_gradients,
    finite_diff_gradients,
    forward,
    forward_batch,
    gradient_check_error,
    init_mlp,
    loss_mse,
    train_mlp,
)

__all__ = [
    # Closed-form
    "bmi",
    "siri_bf",
    "navy_bf_male",
    "clamp_bf",
    # Linear
    "fit_ols",
    "fit_gd",
    "predict_linear",
    "strongest_predictor",
    "GradientDescentConfig",
    # Neural
    "init_mlp",
    "forward",
    "forward_batch",
    "loss_mse",
    "backprop_gradients",
    "finite_diff_gradients",
    "gradient_check_error",
    "train_mlp",
    "TrainConfig",
    "EarlyStopping",
]
