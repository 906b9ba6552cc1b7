"""
Report Models - Training traces, evaluation reports, seed sweeps
"""
import math
from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class TraceEpoch:
    """Loss at the end of one epoch"""
    epoch: int
    train_loss: float
    holdout_loss: Optional[float] = None

    @property
    def monitored_loss(self) -> float:
        return self.holdout_loss if self.holdout_loss is not None else self.train_loss


@dataclass(frozen=True)
class TrainingTrace:
    """
    Per-epoch losses of an iterative fit.

    Epoch indices run 0, 1, 2, ... with no gaps; losses are finite and >= 0.
    """
    epochs: tuple[TraceEpoch, ...]
    best_epoch: Optional[int] = None
    stopped_early: bool = False

    def __len__(self) -> int:
        return len(self.epochs)

    @property
    def has_holdout(self) -> bool:
        return any(e.holdout_loss is not None for e in self.epochs)

    @property
    def train_losses(self) -> list[float]:
        return [e.train_loss for e in self.epochs]

    @property
    def monitored_losses(self) -> list[float]:
        return [e.monitored_loss for e in self.epochs]


@dataclass(frozen=True)
class EvalReport:
    """
    Test-set evaluation of one model.

    Invariants: rmse >= mae >= 0, r2 <= 1, n == len(pairs) >= 1.
    """
    mae: float
    rmse: float
    r2: float
    n: int
    pairs: tuple[tuple[float, float], ...]  # (true, predicted)
    model_descriptor: str
    split_seed: int

    def to_dict(self) -> dict:
        # Key order is part of the artifact format
        return {
            "model_descriptor": self.model_descriptor,
            "split_seed": self.split_seed,
            "n": self.n,
            "mae": self.mae,
            "rmse": self.rmse,
            "r2": self.r2,
            "pairs": [[t, p] for t, p in self.pairs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        return cls(
            mae=float(data["mae"]),
            rmse=float(data["rmse"]),
            r2=float(data["r2"]),
            n=int(data["n"]),
            pairs=tuple((float(t), float(p)) for t, p in data["pairs"]),
            model_descriptor=data["model_descriptor"],
            split_seed=int(data["split_seed"]),
        )


METRIC_NAMES = ("mae", "rmse", "r2")
PERCENTILES = (10, 50, 90)


def nearest_rank(values: list[float], percentile: float) -> float:
    """Nearest-rank percentile: the ceil(p/100 * N)-th smallest value"""
    ordered = sorted(values)
    rank = max(1, math.ceil(percentile / 100.0 * len(ordered)))
    return ordered[rank - 1]


@dataclass(frozen=True)
class SweepResult:
    """Per-seed reports (ascending seed) and nearest-rank percentiles"""
    reports: tuple[EvalReport, ...]
    percentiles: dict[str, dict[str, float]] = field(default_factory=dict)

    @classmethod
    def from_reports(cls, reports: list[EvalReport]) -> "SweepResult":
        ordered = tuple(sorted(reports, key=lambda r: r.split_seed))
        percentiles = {
            metric: {
                f"p{p}": nearest_rank([getattr(r, metric) for r in ordered], p)
                for p in PERCENTILES
            }
            for metric in METRIC_NAMES
        }
        return cls(reports=ordered, percentiles=percentiles)

    @property
    def seeds(self) -> list[int]:
        return [r.split_seed for r in self.reports]

    def to_dict(self) -> dict:
        return {
            "seeds": self.seeds,
            "percentiles": self.percentiles,
            "per_seed": [
                {
                    "seed": r.split_seed,
                    "model_descriptor": r.model_descriptor,
                    "n": r.n,
                    "mae": r.mae,
                    "rmse": r.rmse,
                    "r2": r.r2,
                }
                for r in self.reports
            ],
        }
