"""
Regression Metrics - MAE, RMSE, R² (coefficient of determination)
"""
from typing import Sequence

import numpy as np

from errors import DomainError
from models.report import EvalReport


def _pair(true_values, predicted, minimum: int = 1) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(true_values, dtype=np.float64).reshape(-1)
    p = np.asarray(predicted, dtype=np.float64).reshape(-1)
    if y.shape != p.shape:
        raise DomainError(f"length mismatch: {y.shape[0]} true vs {p.shape[0]} predicted")
    if y.shape[0] < minimum:
        raise DomainError(f"need at least {minimum} samples, got {y.shape[0]}")
    return y, p


def mae(true_values, predicted) -> float:
    """(1/n) Σ |y - ŷ|"""
    y, p = _pair(true_values, predicted)
    return float(np.mean(np.abs(y - p)))


def rmse(true_values, predicted) -> float:
    """sqrt((1/n) Σ (y - ŷ)²)"""
    y, p = _pair(true_values, predicted)
    return float(np.sqrt(np.mean((y - p) ** 2)))


def r2(true_values, predicted) -> float:
    """1 - SS_res / SS_tot; negative when worse than predicting the mean"""
    y, p = _pair(true_values, predicted, minimum=2)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise DomainError("R² is undefined when all true values are identical")
    ss_res = float(np.sum((y - p) ** 2))
    return 1.0 - ss_res / ss_tot


def evaluate(
    true_values: Sequence[float],
    predicted: Sequence[float],
    model_descriptor: str,
    split_seed: int,
) -> EvalReport:
    """Bundle the three metrics with the (true, predicted) pairs"""
    y, p = _pair(true_values, predicted, minimum=2)
    return EvalReport(
        mae=mae(y, p),
        rmse=rmse(y, p),
        r2=r2(y, p),
        n=int(y.shape[0]),
        pairs=tuple((float(t), float(q)) for t, q in zip(y, p)),
        model_descriptor=model_descriptor,
        split_seed=int(split_seed),
    )
