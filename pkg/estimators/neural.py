"""
Feedforward Regressor - numpy MLP with backpropagation

Mini-batch gradient descent on mean squared error with seeded batch
shuffling, per-epoch loss tracing, optional holdout monitoring and early
stopping with best-epoch restoration. All randomness comes from
`dataset.rng` streams derived from `TrainConfig.seed`.
"""
import logging
import math
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from config import config
from dataset.rng import STREAM_HOLDOUT, STREAM_INIT, STREAM_SHUFFLE, DeterministicStream, validate_seed
from errors import ConfigurationError, DivergenceError, DomainError
from estimators.early_stopping import EarlyStopping
from models.linear import Standardization
from models.mlp import ACTIVATIONS, MlpGradients, MlpModel, validate_layer_dims
from models.report import TraceEpoch, TrainingTrace

logger = logging.getLogger(__name__)


class TrainConfig(BaseModel):
    """MLP training protocol"""
    learning_rate: float = Field(default_factory=lambda: config.neural.learning_rate, gt=0)
    batch_size: int = Field(default_factory=lambda: config.neural.batch_size, gt=0)
    max_epochs: int = Field(default_factory=lambda: config.neural.max_epochs, gt=0)
    early_stopping_patience: int = Field(default_factory=lambda: config.neural.patience, ge=0)
    early_stopping_min_delta: float = Field(default_factory=lambda: config.neural.min_delta, ge=0)
    holdout_fraction: float = Field(
        default_factory=lambda: config.neural.holdout_fraction, ge=0, lt=0.5,
        description="0 monitors the training loss instead of a holdout",
    )
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    hidden_dims: list[int] = Field(default_factory=lambda: list(config.neural.hidden_dims))
    activation: str = Field(default_factory=lambda: config.neural.activation)


def build_train_config(**overrides) -> TrainConfig:
    values = {k: v for k, v in overrides.items() if v is not None}
    try:
        cfg = TrainConfig(**values)
    except ValidationError as e:
        raise ConfigurationError(f"invalid training config: {e}") from None
    if cfg.activation not in ACTIVATIONS:
        raise ConfigurationError(f"unknown activation '{cfg.activation}'")
    if any(d <= 0 for d in cfg.hidden_dims):
        raise ConfigurationError(f"hidden layer widths must be positive, got {cfg.hidden_dims}")
    return cfg


# ----------------------------------------------------------------------
# Core arithmetic on standardized inputs
# ----------------------------------------------------------------------

def _activate(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == "relu":
        return np.maximum(z, 0.0)
    if activation == "tanh":
        return np.tanh(z)
    return z


def _activate_grad(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == "relu":
        return (z > 0).astype(np.float64)
    if activation == "tanh":
        return 1.0 - np.tanh(z) ** 2
    return np.ones_like(z)


def _forward_z(weights, biases, activation, Z):
    """Returns (layer inputs, pre-activations, output vector)"""
    inputs, pre = [], []
    a = Z
    last = len(weights) - 1
    for k, (W, b) in enumerate(zip(weights, biases)):
        inputs.append(a)
        z = a @ W.T + b
        pre.append(z)
        a = z if k == last else _activate(z, activation)
    return inputs, pre, a[:, 0]


def _backward_z(weights, biases, activation, Z, y):
    inputs, pre, out = _forward_z(weights, biases, activation, Z)
    m = Z.shape[0]
    delta = (2.0 / m) * (out - y).reshape(-1, 1)
    grad_w = [None] * len(weights)
    grad_b = [None] * len(weights)
    for k in range(len(weights) - 1, -1, -1):
        grad_w[k] = delta.T @ inputs[k]
        grad_b[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ weights[k]) * _activate_grad(pre[k - 1], activation)
    return grad_w, grad_b


def _mse(predictions: np.ndarray, targets: np.ndarray) -> float:
    return float(np.mean((predictions - targets) ** 2))


def _check_batch(model: MlpModel, features, targets=None) -> tuple[np.ndarray, Optional[np.ndarray]]:
    X = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if X.shape[0] == 0:
        raise ConfigurationError("empty batch")
    if X.shape[1] != model.input_dim:
        raise ConfigurationError(f"expected {model.input_dim} features, got {X.shape[1]}")
    if targets is None:
        return X, None
    y = np.asarray(targets, dtype=np.float64).reshape(-1)
    if y.shape[0] != X.shape[0]:
        raise ConfigurationError(f"{X.shape[0]} feature rows but {y.shape[0]} targets")
    return X, y


# ----------------------------------------------------------------------
# Public operations
# ----------------------------------------------------------------------

def init_mlp(
    layer_dims: Sequence[int],
    activation: str = "relu",
    seed: int = 0,
    standardization: Optional[Standardization] = None,
    feature_names: Sequence[str] = (),
) -> MlpModel:
    """
    Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)) from the `init`
    stream, drawn layer by layer in row-major order; biases zero.
    """
    dims = tuple(int(d) for d in layer_dims)
    validate_layer_dims(dims)
    if activation not in ACTIVATIONS:
        raise ConfigurationError(f"unknown activation '{activation}'")
    stream = DeterministicStream(validate_seed(seed), STREAM_INIT)

    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        scale = 1.0 / math.sqrt(fan_in)
        u = stream.uniform(fan_out * fan_in).reshape(fan_out, fan_in)
        weights.append((2.0 * u - 1.0) * scale)
        biases.append(np.zeros(fan_out))

    if standardization is None:
        standardization = Standardization(means=(0.0,) * dims[0], sds=(1.0,) * dims[0])
    return MlpModel(
        layer_dims=dims,
        activation=activation,
        weights=tuple(weights),
        biases=tuple(biases),
        standardization=standardization,
        feature_names=tuple(feature_names),
    )


def forward_batch(model: MlpModel, features) -> np.ndarray:
    """Predictions for a (n, input_dim) raw-unit matrix"""
    X, _ = _check_batch(model, features)
    Z = model.standardization.apply(X)
    return _forward_z(model.weights, model.biases, model.activation, Z)[2]


def forward(model: MlpModel, features: Sequence[float]) -> float:
    """Prediction for one raw-unit feature vector"""
    row = np.asarray(features, dtype=np.float64).reshape(-1)
    if row.shape[0] != model.input_dim:
        raise ConfigurationError(f"expected {model.input_dim} features, got {row.shape[0]}")
    return float(forward_batch(model, row.reshape(1, -1))[0])


def loss_mse(predictions, targets) -> float:
    """Mean squared difference"""
    p = np.asarray(predictions, dtype=np.float64).reshape(-1)
    t = np.asarray(targets, dtype=np.float64).reshape(-1)
    if p.shape[0] == 0 or t.shape[0] == 0:
        raise DomainError("loss of empty inputs is undefined")
    if p.shape != t.shape:
        raise DomainError(f"length mismatch: {p.shape[0]} predictions, {t.shape[0]} targets")
    return _mse(p, t)


def backprop_gradients(model: MlpModel, feature_batch, target_batch) -> MlpGradients:
    """Exact gradient of batch MSE with respect to every weight and bias"""
    X, y = _check_batch(model, feature_batch, target_batch)
    Z = model.standardization.apply(X)
    grad_w, grad_b = _backward_z(model.weights, model.biases, model.activation, Z, y)
    return MlpGradients(weights=tuple(grad_w), biases=tuple(grad_b))


def finite_diff_gradients(model: MlpModel, feature_batch, target_batch, epsilon: float = 1e-5) -> MlpGradients:
    """Central differences (L(θ+ε) - L(θ-ε)) / 2ε, one parameter at a time"""
    if not epsilon > 0:
        raise ConfigurationError(f"epsilon must be positive, got {epsilon}")
    X, y = _check_batch(model, feature_batch, target_batch)
    Z = model.standardization.apply(X)
    weights = [w.copy() for w in model.weights]
    biases = [b.copy() for b in model.biases]

    def loss() -> float:
        return _mse(_forward_z(weights, biases, model.activation, Z)[2], y)

    def estimate(tensor: np.ndarray) -> np.ndarray:
        grad = np.zeros_like(tensor)
        for index in np.ndindex(tensor.shape):
            original = tensor[index]
            tensor[index] = original + epsilon
            plus = loss()
            tensor[index] = original - epsilon
            minus = loss()
            tensor[index] = original
            grad[index] = (plus - minus) / (2.0 * epsilon)
        return grad

    return MlpGradients(
        weights=tuple(estimate(w) for w in weights),
        biases=tuple(estimate(b) for b in biases),
    )


def gradient_check_error(analytic: MlpGradients, numeric: MlpGradients) -> float:
    """max |a - b| / max(|a|, |b|, 1e-6) over every parameter"""
    a = analytic.flat()
    b = numeric.flat()
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-6)
    return float(np.max(np.abs(a - b) / scale))


def train_mlp(
    X: np.ndarray,
    y: np.ndarray,
    train_config: Optional[TrainConfig] = None,
    feature_names: Optional[Sequence[str]] = None,
) -> tuple[MlpModel, TrainingTrace]:
    """
    Train [p, *hidden_dims, 1] on (X, y).

    With holdout_fraction > 0 a seeded holdout of max(1, floor(f·n))
    samples is carved out and monitored; otherwise the training loss is.
    Returns the parameters of the epoch with the lowest monitored loss.
    """
    cfg = train_config or build_train_config()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ConfigurationError(f"design {X.shape} does not match target {y.shape}")
    n, p = X.shape
    if n < 2:
        raise DomainError(f"need at least 2 training samples, got {n}")
    names = tuple(feature_names) if feature_names is not None else ()

    standardization = Standardization.fit(X)
    if any(sd == 0 for sd in standardization.sds):
        logger.warning("constant feature column(s); leaving them unscaled")
        standardization = Standardization(
            means=standardization.means,
            sds=tuple(sd if sd > 0 else 1.0 for sd in standardization.sds),
        )
    Z = standardization.apply(X)

    if cfg.holdout_fraction > 0:
        n_hold = max(1, math.floor(cfg.holdout_fraction * n))
        if n - n_hold < 1:
            raise DomainError(f"holdout of {n_hold} leaves no training samples")
        order = DeterministicStream(cfg.seed, STREAM_HOLDOUT).permutation(n)
        hold_idx = np.array(sorted(order[:n_hold]))
        fit_idx = np.array(sorted(order[n_hold:]))
    else:
        hold_idx = np.array([], dtype=int)
        fit_idx = np.arange(n)
    Z_fit, y_fit = Z[fit_idx], y[fit_idx]
    Z_hold, y_hold = Z[hold_idx], y[hold_idx]

    dims = (p, *cfg.hidden_dims, 1)
    model = init_mlp(dims, cfg.activation, cfg.seed, standardization, names)
    weights = [w.copy() for w in model.weights]
    biases = [b.copy() for b in model.biases]

    shuffler = DeterministicStream(cfg.seed, STREAM_SHUFFLE)
    stopper = EarlyStopping(cfg.early_stopping_patience, cfg.early_stopping_min_delta)
    epochs: list[TraceEpoch] = []
    lr = cfg.learning_rate

    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(cfg.max_epochs):
            order = shuffler.permutation(len(fit_idx))
            for start in range(0, len(order), cfg.batch_size):
                batch = order[start:start + cfg.batch_size]
                grad_w, grad_b = _backward_z(weights, biases, cfg.activation, Z_fit[batch], y_fit[batch])
                for k in range(len(weights)):
                    weights[k] -= lr * grad_w[k]
                    biases[k] -= lr * grad_b[k]

            train_loss = _mse(_forward_z(weights, biases, cfg.activation, Z_fit)[2], y_fit)
            holdout_loss = None
            if len(hold_idx):
                holdout_loss = _mse(_forward_z(weights, biases, cfg.activation, Z_hold)[2], y_hold)
            if not math.isfinite(train_loss) or (holdout_loss is not None and not math.isfinite(holdout_loss)):
                raise DivergenceError("training loss became non-finite", epoch)

            record = TraceEpoch(epoch=epoch, train_loss=train_loss, holdout_loss=holdout_loss)
            epochs.append(record)
            snapshot = ([w.copy() for w in weights], [b.copy() for b in biases])
            if stopper(epoch, record.monitored_loss, snapshot):
                logger.info(f"early stop at epoch {epoch} (best epoch {stopper.best_epoch})")
                break

    best_weights, best_biases = stopper.best_state
    trained = model.with_parameters(best_weights, best_biases)
    trace = TrainingTrace(
        epochs=tuple(epochs), best_epoch=stopper.best_epoch, stopped_early=stopper.early_stop
    )
    logger.info(
        f"MLP {trained.descriptor}: {len(epochs)} epochs, "
        f"best monitored loss {stopper.lowest_loss:.6g} at epoch {stopper.best_epoch}"
    )
    return trained, trace
