"""
Dataset Models - Anthropometric records, cohort summary, train/test split
"""
from dataclasses import dataclass, field, fields
from typing import Optional


# Numeric measurement fields, schema order (case_id excluded)
MEASUREMENT_FIELDS = (
    "density", "bodyfat", "age", "weight", "height",
    "neck", "chest", "abdomen", "hip", "thigh", "knee", "ankle",
    "biceps", "forearm", "wrist",
)

# Fields that must be strictly positive
CIRCUMFERENCE_FIELDS = (
    "neck", "chest", "abdomen", "hip", "thigh", "knee", "ankle",
    "biceps", "forearm", "wrist",
)


@dataclass(frozen=True)
class AnthropometricRecord:
    """
    One subject: measurements plus the underwater-weighing ground truth.

    Canonical units: weight kg, height and circumferences cm,
    density g/cm³, bodyfat %.
    """
    case_id: int
    density: float
    bodyfat: float
    age: float
    weight: float
    height: float
    neck: float
    chest: float
    abdomen: float
    hip: float
    thigh: float
    knee: float
    ankle: float
    biceps: float
    forearm: float
    wrist: float

    # Anomaly notes attached at ingestion; not part of the CSV schema
    flags: tuple[str, ...] = field(default=(), compare=False)

    def value(self, name: str) -> float:
        return float(getattr(self, name))

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "flags"}

    @classmethod
    def from_dict(cls, data: dict) -> "AnthropometricRecord":
        return cls(
            case_id=int(data["case_id"]),
            **{name: float(data[name]) for name in MEASUREMENT_FIELDS},
            flags=tuple(data.get("flags", ())),
        )


@dataclass(frozen=True)
class FieldStats:
    """Mean and sample standard deviation of one field"""
    mean: float
    sd: float


@dataclass(frozen=True)
class CohortSummary:
    """Per-field mean ± SD of a cohort, with anomaly warnings"""
    n: int
    fields: dict[str, FieldStats]
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "fields": {
                name: {"mean": stats.mean, "sd": stats.sd}
                for name, stats in self.fields.items()
            },
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class DatasetSplit:
    """
    Seeded partition of record indices.

    train and test are disjoint, cover 0..n-1 exactly once,
    and len(train) == floor(ratio * n).
    """
    seed: int
    ratio: float
    train_indices: tuple[int, ...]
    test_indices: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.train_indices) + len(self.test_indices)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "ratio": self.ratio,
            "train_indices": list(self.train_indices),
            "test_indices": list(self.test_indices),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetSplit":
        return cls(
            seed=int(data["seed"]),
            ratio=float(data["ratio"]),
            train_indices=tuple(int(i) for i in data["train_indices"]),
            test_indices=tuple(int(i) for i in data["test_indices"]),
        )
