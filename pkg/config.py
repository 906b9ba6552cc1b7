"""
Body Fat Bench - Configuration Management
Dataclass defaults with environment overrides
"""
import os
from dataclasses import dataclass, field
from typing import Literal


@dataclass
class DataConfig:
    """Dataset location and unit regime"""
    path: str = "data/bodyfat.csv"
    units: Literal["metric", "imperial"] = "imperial"  # the public file ships lb/in
    clean: bool = False                                 # drop flagged records on load

    # Canonical CSV schema, in column order
    SCHEMA = (
        "case_id", "density", "bodyfat", "age", "weight", "height",
        "neck", "chest", "abdomen", "hip", "thigh", "knee", "ankle",
        "biceps", "forearm", "wrist",
    )


@dataclass
class NavyConstants:
    """U.S. Navy male equation, metric form (cm inputs, base-10 logs)

    BF% = 495 / (c0 - c1*log10(waist - neck) + c2*log10(height)) - 450
    """
    c0: float = 1.0324
    c1: float = 0.19077
    c2: float = 0.15456


@dataclass
class RegressionDefaults:
    """Linear model defaults"""
    features: list[str] = field(
        default_factory=lambda: ["weight", "chest", "abdomen", "hip", "thigh"]
    )
    target: str = "bodyfat"
    condition_limit: float = 1e12

    # Gradient descent
    learning_rate: float = 0.05
    max_epochs: int = 5000
    tolerance: float = 1e-10
    divergence_limit: float = 1e12


@dataclass
class NeuralDefaults:
    """Feedforward regressor defaults (artifact choices, not from the study)"""
    hidden_dims: list[int] = field(default_factory=lambda: [16, 8])
    activation: Literal["relu", "tanh", "identity"] = "relu"
    learning_rate: float = 0.01
    batch_size: int = 16
    max_epochs: int = 50
    patience: int = 10
    min_delta: float = 1e-5
    holdout_fraction: float = 0.1


@dataclass
class HarnessConfig:
    """Experiment harness settings"""
    split_ratio: float = 0.8
    seed: int = 0
    output_dir: str = "results"
    workers: int = 4
    log_level: str = "INFO"


@dataclass
class Config:
    """Main Configuration"""
    data: DataConfig = field(default_factory=DataConfig)
    navy: NavyConstants = field(default_factory=NavyConstants)
    regression: RegressionDefaults = field(default_factory=RegressionDefaults)
    neural: NeuralDefaults = field(default_factory=NeuralDefaults)
    harness: HarnessConfig = field(default_factory=HarnessConfig)


# Global config instance
config = Config()


def load_config_from_env() -> Config:
    """Load configuration from environment variables"""
    global config

    config.data.path = os.getenv("BODYFAT_DATA", config.data.path)
    config.data.units = os.getenv("BODYFAT_UNITS", config.data.units)
    config.data.clean = os.getenv("BODYFAT_CLEAN", str(config.data.clean)).lower() == "true"

    config.navy.c0 = float(os.getenv("BODYFAT_NAVY_C0", str(config.navy.c0)))
    config.navy.c1 = float(os.getenv("BODYFAT_NAVY_C1", str(config.navy.c1)))
    config.navy.c2 = float(os.getenv("BODYFAT_NAVY_C2", str(config.navy.c2)))

    config.harness.output_dir = os.getenv("BODYFAT_OUTPUT_DIR", config.harness.output_dir)
    config.harness.workers = int(os.getenv("BODYFAT_WORKERS", str(config.harness.workers)))
    config.harness.log_level = os.getenv("BODYFAT_LOG_LEVEL", config.harness.log_level).upper()

    return config
