"""
Features & Splits - design matrices and seeded train/test partitions
"""
import logging
import math
from typing import Callable, Sequence

import numpy as np

from dataset.rng import STREAM_SPLIT, DeterministicStream, validate_seed
from errors import ConfigurationError, DomainError
from estimators.formulas import bmi
from models.records import MEASUREMENT_FIELDS, AnthropometricRecord, DatasetSplit

logger = logging.getLogger(__name__)

# Virtual fields computed from a record
DERIVED_FEATURES: dict[str, Callable[[AnthropometricRecord], float]] = {
    "bmi": lambda r: bmi(r.weight, r.height / 100.0),
}


def valid_feature_names() -> list[str]:
    return list(MEASUREMENT_FIELDS) + list(DERIVED_FEATURES)


def _column(records: Sequence[AnthropometricRecord], name: str) -> np.ndarray:
    if name in DERIVED_FEATURES:
        fn = DERIVED_FEATURES[name]
        return np.array([fn(r) for r in records], dtype=np.float64)
    return np.array([r.value(name) for r in records], dtype=np.float64)


def _check_name(name: str, role: str) -> None:
    if name not in MEASUREMENT_FIELDS and name not in DERIVED_FEATURES:
        raise ConfigurationError(
            f"unknown {role} '{name}'; valid names: {', '.join(valid_feature_names())}"
        )


def select_features(
    records: Sequence[AnthropometricRecord],
    feature_names: Sequence[str],
    target_name: str = "bodyfat",
) -> tuple[np.ndarray, np.ndarray]:
    """
    Design matrix (n, p) in record order, columns in `feature_names` order,
    plus the row-aligned target vector.
    """
    if not feature_names:
        raise ConfigurationError(
            f"feature list is empty; valid names: {', '.join(valid_feature_names())}"
        )
    for name in feature_names:
        _check_name(name, "feature")
    _check_name(target_name, "target")

    n = len(records)
    X = np.empty((n, len(feature_names)), dtype=np.float64)
    for j, name in enumerate(feature_names):
        X[:, j] = _column(records, name)
    y = _column(records, target_name)
    return X, y


def split(records: Sequence, ratio: float = 0.8, seed: int = 0) -> DatasetSplit:
    """
    Seeded shuffle split: Fisher-Yates over range(n) on the `split`
    stream; the first floor(ratio * n) shuffled indices train, the rest test.
    """
    return split_indices(len(records), ratio, seed)


def split_indices(n: int, ratio: float, seed: int, stream: int = STREAM_SPLIT) -> DatasetSplit:
    seed = validate_seed(seed)
    if not 0.0 < ratio < 1.0:
        raise ConfigurationError(f"split ratio must lie in (0, 1), got {ratio}")
    if n < 2:
        raise DomainError(f"need at least 2 records to split, got {n}")
    n_train = math.floor(ratio * n)
    if n_train == 0 or n_train == n:
        raise DomainError(f"ratio {ratio} on {n} records leaves one side empty")

    order = DeterministicStream(seed, stream).permutation(n)
    result = DatasetSplit(
        seed=seed,
        ratio=ratio,
        train_indices=tuple(order[:n_train]),
        test_indices=tuple(order[n_train:]),
    )
    logger.debug(f"split seed={seed} ratio={ratio}: {n_train} train / {n - n_train} test")
    return result


def take(records: Sequence, indices: Sequence[int]) -> list:
    return [records[i] for i in indices]
