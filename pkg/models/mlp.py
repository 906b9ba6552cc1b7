"""
MLP Model - Feedforward regressor parameters
"""
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from errors import ConfigurationError
from models.linear import Standardization

Activation = Literal["relu", "tanh", "identity"]
ACTIVATIONS = ("relu", "tanh", "identity")


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=np.float64, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class MlpModel:
    """
    Feedforward network input → hidden... → 1.

    weights[k] has shape (layer_dims[k+1], layer_dims[k]); biases[k] has
    shape (layer_dims[k+1],). Hidden layers use `activation`, the output
    layer is identity. Parameter arrays are read-only.
    """
    layer_dims: tuple[int, ...]
    activation: str
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    standardization: Standardization
    feature_names: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(_frozen(w) for w in self.weights))
        object.__setattr__(self, "biases", tuple(_frozen(b) for b in self.biases))
        validate_layer_dims(self.layer_dims)
        if self.activation not in ACTIVATIONS:
            raise ConfigurationError(
                f"unknown activation '{self.activation}', expected one of {', '.join(ACTIVATIONS)}"
            )
        if len(self.weights) != len(self.layer_dims) - 1 or len(self.biases) != len(self.weights):
            raise ConfigurationError("one weight matrix and bias vector per layer transition required")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            expected = (self.layer_dims[k + 1], self.layer_dims[k])
            if w.shape != expected or b.shape != (expected[0],):
                raise ConfigurationError(
                    f"layer {k}: weight {w.shape} / bias {b.shape} do not match dims {expected}"
                )
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ConfigurationError(f"layer {k}: non-finite parameters")
        if len(self.standardization.means) != self.input_dim:
            raise ConfigurationError("standardization does not match input dimension")
        if self.feature_names and len(self.feature_names) != self.input_dim:
            raise ConfigurationError("feature_names do not match input dimension")

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def descriptor(self) -> str:
        dims = "-".join(str(d) for d in self.layer_dims)
        return f"mlp[{dims}]({self.activation})"

    def with_parameters(
        self, weights: Sequence[np.ndarray], biases: Sequence[np.ndarray]
    ) -> "MlpModel":
        """Same architecture, new parameters"""
        return MlpModel(
            layer_dims=self.layer_dims,
            activation=self.activation,
            weights=tuple(weights),
            biases=tuple(biases),
            standardization=self.standardization,
            feature_names=self.feature_names,
        )

    def to_dict(self) -> dict:
        return {
            "layer_dims": list(self.layer_dims),
            "activation": self.activation,
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "standardization": self.standardization.to_dict(),
            "feature_names": list(self.feature_names),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MlpModel":
        return cls(
            layer_dims=tuple(int(d) for d in data["layer_dims"]),
            activation=data["activation"],
            weights=tuple(np.asarray(w, dtype=np.float64) for w in data["weights"]),
            biases=tuple(np.asarray(b, dtype=np.float64) for b in data["biases"]),
            standardization=Standardization.from_dict(data["standardization"]),
            feature_names=tuple(data.get("feature_names", ())),
        )

    @staticmethod
    def is_serialized(data: dict) -> bool:
        return "layer_dims" in data


@dataclass(frozen=True)
class MlpGradients:
    """Gradient tensors, shaped like the model's parameters"""
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]

    def flat(self) -> np.ndarray:
        parts = [w.ravel() for w in self.weights] + [b.ravel() for b in self.biases]
        return np.concatenate(parts)


def validate_layer_dims(layer_dims: Sequence[int]) -> None:
    if len(layer_dims) < 2:
        raise ConfigurationError("layer_dims needs at least an input and an output dimension")
    if any(int(d) <= 0 for d in layer_dims):
        raise ConfigurationError(f"every layer dimension must be positive, got {list(layer_dims)}")
    if layer_dims[-1] != 1:
        raise ConfigurationError(f"output dimension must be 1, got {layer_dims[-1]}")
