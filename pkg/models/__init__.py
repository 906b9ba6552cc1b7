"""
Models Package - Immutable domain values
"""
from .records import AnthropometricRecord, CohortSummary, DatasetSplit, FieldStats
from .linear import LinearModel, Standardization
from .mlp import MlpGradients, MlpModel
from .report import EvalReport, SweepResult, TraceEpoch, TrainingTrace

__all__ = [
    "AnthropometricRecord",
    "CohortSummary",
    "DatasetSplit",
    "FieldStats",
    "LinearModel",
    "Standardization",
    "MlpModel",
    "MlpGradients",
    "EvalReport",
    "SweepResult",
    "TraceEpoch",
    "TrainingTrace",
]
