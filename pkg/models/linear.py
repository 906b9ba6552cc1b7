"""
Linear Model - Fitted OLS / gradient-descent regression
"""
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from errors import ConfigurationError


@dataclass(frozen=True)
class Standardization:
    """Per-feature z-score parameters, fitted on training data only"""
    means: tuple[float, ...]
    sds: tuple[float, ...]

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardization":
        """Population mean/sd of each column"""
        X = np.asarray(X, dtype=np.float64)
        return cls(
            means=tuple(float(m) for m in X.mean(axis=0)),
            sds=tuple(float(s) for s in X.std(axis=0)),
        )

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return (X - np.asarray(self.means)) / np.asarray(self.sds)

    def to_dict(self) -> dict:
        return {"means": list(self.means), "sds": list(self.sds)}

    @classmethod
    def from_dict(cls, data: dict) -> "Standardization":
        return cls(
            means=tuple(float(m) for m in data["means"]),
            sds=tuple(float(s) for s in data["sds"]),
        )


@dataclass(frozen=True)
class LinearModel:
    """
    Linear body-fat model over standardized features.

    prediction = intercept + sum(coefficients[j] * (x[j] - mean[j]) / sd[j])

    Coefficients are in %BF per standardized unit, so their magnitudes
    are directly comparable across features.
    """
    feature_names: tuple[str, ...]
    coefficients: tuple[float, ...]
    intercept: float
    standardization: Standardization

    def __post_init__(self):
        if len(self.coefficients) != len(self.feature_names):
            raise ConfigurationError(
                f"{len(self.coefficients)} coefficients for {len(self.feature_names)} features"
            )
        if any(not sd > 0 for sd in self.standardization.sds):
            raise ConfigurationError("standardization sd must be positive for every feature")

    @property
    def descriptor(self) -> str:
        return f"linear({','.join(self.feature_names)})"

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Vectorised prediction for a (n, p) raw-unit matrix"""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != len(self.feature_names):
            raise ConfigurationError(
                f"expected {len(self.feature_names)} features "
                f"({', '.join(self.feature_names)}), got {X.shape[1]}"
            )
        Z = self.standardization.apply(X)
        return self.intercept + Z @ np.asarray(self.coefficients)

    def raw_coefficients(self) -> tuple[list[float], float]:
        """Slopes per raw unit and the matching raw-unit intercept"""
        coef = np.asarray(self.coefficients)
        means = np.asarray(self.standardization.means)
        sds = np.asarray(self.standardization.sds)
        slopes = coef / sds
        intercept = self.intercept - float(np.sum(slopes * means))
        return [float(s) for s in slopes], intercept

    def to_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "coefficients": list(self.coefficients),
            "intercept": self.intercept,
            "standardization": self.standardization.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LinearModel":
        return cls(
            feature_names=tuple(data["feature_names"]),
            coefficients=tuple(float(c) for c in data["coefficients"]),
            intercept=float(data["intercept"]),
            standardization=Standardization.from_dict(data["standardization"]),
        )

    @staticmethod
    def is_serialized(data: dict) -> bool:
        return "coefficients" in data and "intercept" in data


def as_feature_row(values: Sequence[float], expected: int) -> np.ndarray:
    """Single feature vector → (1, p) matrix, checking arity"""
    row = np.asarray(values, dtype=np.float64).reshape(-1)
    if row.shape[0] != expected:
        raise ConfigurationError(f"expected {expected} feature values, got {row.shape[0]}")
    return row.reshape(1, -1)
