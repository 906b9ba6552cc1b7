"""
Linear Regression - exact OLS (QR) and full-batch gradient descent

Both fits z-score the features on the data they are given and store
coefficients in standardized units; the intercept is the fitted value at
the feature means.
"""
import logging
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from config import config
from errors import ConfigurationError, DivergenceError, SingularDesignError
from models.linear import LinearModel, Standardization, as_feature_row
from models.report import TraceEpoch, TrainingTrace

logger = logging.getLogger(__name__)

# learning rates within this fraction of the stability limit barely contract
STABILITY_MARGIN = 1e-9
# relative slack for loss rises caused by float round-off
ROUNDOFF = 1e-12


class GradientDescentConfig(BaseModel):
    """Full-batch gradient descent settings"""
    learning_rate: float = Field(default_factory=lambda: config.regression.learning_rate, gt=0, description="Step size")
    max_epochs: int = Field(default_factory=lambda: config.regression.max_epochs, gt=0, description="Epoch cap")
    tolerance: float = Field(
        default_factory=lambda: config.regression.tolerance, gt=0,
        description="Stop once the per-epoch loss improvement drops below this",
    )
    divergence_limit: float = Field(
        default_factory=lambda: config.regression.divergence_limit, gt=0,
        description="Loss above this aborts as divergent",
    )


def build_gd_config(**overrides) -> GradientDescentConfig:
    values = {k: v for k, v in overrides.items() if v is not None}
    try:
        return GradientDescentConfig(**values)
    except ValidationError as e:
        raise ConfigurationError(f"invalid gradient-descent config: {e}") from None


def _prepare(
    X: np.ndarray, y: np.ndarray, feature_names: Optional[Sequence[str]]
) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ConfigurationError(f"design matrix must be 2-D, got shape {X.shape}")
    n, p = X.shape
    if n != y.shape[0]:
        raise ConfigurationError(f"design has {n} rows but target has {y.shape[0]} values")
    if p == 0:
        raise ConfigurationError("design matrix has no feature columns")
    if n <= p:
        raise ConfigurationError(f"need more rows than columns, got {n} x {p}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ConfigurationError("design matrix and target must be finite")
    if feature_names is None:
        names = tuple(f"x{j}" for j in range(p))
    else:
        names = tuple(feature_names)
        if len(names) != p:
            raise ConfigurationError(f"{len(names)} feature names for {p} columns")
    return X, y, names


def _standardize(X: np.ndarray, names: tuple[str, ...]) -> tuple[Standardization, np.ndarray]:
    standardization = Standardization.fit(X)
    constant = [name for name, sd in zip(names, standardization.sds) if not sd > 0]
    if constant:
        raise SingularDesignError("constant feature column is collinear with the intercept", constant)
    return standardization, standardization.apply(X)


def _collinear_columns(Z: np.ndarray, names: tuple[str, ...]) -> list[str]:
    """Columns carrying weight in the smallest right-singular vector"""
    _, _, vt = np.linalg.svd(Z, full_matrices=False)
    v = np.abs(vt[-1])
    return [name for name, weight in zip(names, v) if weight > 0.1 * v.max()]


def fit_ols(
    X: np.ndarray,
    y: np.ndarray,
    feature_names: Optional[Sequence[str]] = None,
    condition_limit: Optional[float] = None,
) -> LinearModel:
    """
    Ordinary least squares with intercept.

    Solved as R b = Q^T (y - mean(y)) on the standardized design, Z = QR;
    the normal matrix is never formed. A condition number above
    `condition_limit` (default 1e12) raises SingularDesignError.
    """
    X, y, names = _prepare(X, y, feature_names)
    limit = condition_limit or config.regression.condition_limit
    standardization, Z = _standardize(X, names)

    cond = np.linalg.cond(Z)
    if not np.isfinite(cond) or cond > limit:
        raise SingularDesignError(
            f"design is rank-deficient (condition number {cond:.3g} > {limit:.3g})",
            _collinear_columns(Z, names),
        )

    Q, R = np.linalg.qr(Z, mode="reduced")
    y_mean = float(y.mean())
    coefficients = np.linalg.solve(R, Q.T @ (y - y_mean))

    model = LinearModel(
        feature_names=names,
        coefficients=tuple(float(c) for c in coefficients),
        intercept=y_mean,
        standardization=standardization,
    )
    logger.info(f"OLS fit on {X.shape[0]} rows, {len(names)} features (cond {cond:.1f})")
    return model


def _stable_step_limit(Z: np.ndarray) -> float:
    """Largest learning rate for which full-batch GD on the MSE still contracts"""
    A = np.hstack([Z, np.ones((Z.shape[0], 1))])
    curvature = 2.0 * float(np.linalg.eigvalsh(A.T @ A / Z.shape[0]).max())
    return 2.0 / curvature


def fit_gd(
    X: np.ndarray,
    y: np.ndarray,
    learning_rate: Optional[float] = None,
    max_epochs: Optional[int] = None,
    tolerance: Optional[float] = None,
    feature_names: Optional[Sequence[str]] = None,
    gd_config: Optional[GradientDescentConfig] = None,
) -> tuple[LinearModel, TrainingTrace]:
    """
    Full-batch gradient descent on mean squared error, standardized features.

    Starts from zero weights and intercept. Each epoch records the loss of
    the current parameters, stops once the improvement over the previous
    epoch falls below `tolerance`, then takes one step.

    A learning rate at or past the stability limit of the loss surface
    raises DivergenceError at epoch 1 instead of oscillating. With a stable
    rate the loss can only rise through round-off at its floor; that epoch
    is discarded and the previous parameters are returned.
    """
    cfg = gd_config or build_gd_config(
        learning_rate=learning_rate, max_epochs=max_epochs, tolerance=tolerance
    )
    X, y, names = _prepare(X, y, feature_names)
    standardization, Z = _standardize(X, names)
    n, p = Z.shape

    if cfg.max_epochs > 1:
        limit = _stable_step_limit(Z)
        if cfg.learning_rate >= limit * (1.0 - STABILITY_MARGIN):
            raise DivergenceError(
                f"gradient descent cannot converge: learning rate {cfg.learning_rate} "
                f"is not below the stability limit {limit:.6g}",
                1,
            )

    w = np.zeros(p)
    b = 0.0
    epochs: list[TraceEpoch] = []
    previous: Optional[float] = None
    kept = (w, b)
    converged = False

    for epoch in range(cfg.max_epochs):
        residual = Z @ w + b - y
        loss = float(np.mean(residual ** 2))
        if not np.isfinite(loss) or loss > cfg.divergence_limit:
            raise DivergenceError(
                f"gradient descent diverged (loss {loss:.3g}, learning rate {cfg.learning_rate})",
                epoch,
            )
        if previous is not None and loss > previous:
            if loss - previous > cfg.tolerance + ROUNDOFF * previous:
                raise DivergenceError(
                    f"gradient descent loss rose from {previous:.6g} to {loss:.6g} "
                    f"(learning rate {cfg.learning_rate})",
                    epoch,
                )
            w, b = kept
            converged = True
            break
        epochs.append(TraceEpoch(epoch=epoch, train_loss=loss))
        if previous is not None and previous - loss < cfg.tolerance:
            converged = True
            break
        previous = loss
        kept = (w, b)
        if epoch + 1 == cfg.max_epochs:
            break
        w = w - cfg.learning_rate * (2.0 / n) * (Z.T @ residual)
        b = b - cfg.learning_rate * 2.0 * float(residual.mean())

    if not converged:
        logger.warning(f"gradient descent hit max_epochs={cfg.max_epochs} before converging")
    model = LinearModel(
        feature_names=names,
        coefficients=tuple(float(c) for c in w),
        intercept=float(b),
        standardization=standardization,
    )
    trace = TrainingTrace(epochs=tuple(epochs), best_epoch=len(epochs) - 1, stopped_early=converged)
    logger.info(f"GD fit: {len(epochs)} epochs, final loss {epochs[-1].train_loss:.6g}")
    return model, trace


def predict_linear(model: LinearModel, features: Sequence[float]) -> float:
    """Prediction for one raw-unit feature vector"""
    row = as_feature_row(features, len(model.feature_names))
    return float(model.predict(row)[0])


def strongest_predictor(model: LinearModel) -> str:
    """Feature with the largest |standardized coefficient|; first wins ties"""
    index = int(np.argmax(np.abs(np.asarray(model.coefficients))))
    return model.feature_names[index]


def relative_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """||a - b|| / ||b||, the yardstick for solver agreement"""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-12))
