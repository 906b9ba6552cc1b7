"""
Dataset Package - ingestion, cohort summary, features and splits
"""
from .loader import drop_flagged, find_anomalies, load_csv, write_csv
from .summary import summarize
from .features import select_features, split, take, valid_feature_names
from .rng import DeterministicStream

__all__ = [
    "load_csv",
    "write_csv",
    "find_anomalies",
    "drop_flagged",
    "summarize",
    "select_features",
    "split",
    "take",
    "valid_feature_names",
    "DeterministicStream",
]
