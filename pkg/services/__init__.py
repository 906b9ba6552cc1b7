"""
Services Package - metrics, artifacts and the experiment harness
"""
from .metrics import evaluate, mae, r2, rmse
from .artifacts import emit_scatter, emit_trace
from .experiment import ExperimentConfig, run_experiment, sweep_seeds

__all__ = [
    "mae",
    "rmse",
    "r2",
    "evaluate",
    "emit_scatter",
    "emit_trace",
    "ExperimentConfig",
    "run_experiment",
    "sweep_seeds",
]
