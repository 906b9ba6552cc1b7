import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
ROOT = Path(__file__).parent.parent
sys.path.append(str(ROOT))

from dataset.loader import load_csv, write_csv
from models.records import AnthropometricRecord


def make_records(n: int = 120, seed: int = 2024) -> list[AnthropometricRecord]:
    """Synthetic male cohort with body fat driven mostly by abdomen"""
    rng = np.random.default_rng(seed)
    abdomen = rng.normal(92.0, 10.0, n)
    height = rng.normal(178.0, 7.0, n)
    weight = 0.9 * (abdomen - 92.0) + 0.6 * (height - 178.0) + 81.0 + rng.normal(0, 5.0, n)
    chest = 0.7 * (abdomen - 92.0) + 100.0 + rng.normal(0, 4.0, n)
    hip = 0.5 * (abdomen - 92.0) + 99.0 + rng.normal(0, 3.0, n)
    thigh = 0.3 * (abdomen - 92.0) + 59.0 + rng.normal(0, 3.0, n)
    bodyfat = np.clip(
        19.0 + 0.75 * (abdomen - 92.0) - 0.15 * (weight - 81.0) + rng.normal(0, 3.5, n),
        4.0, 45.0,
    )
    records = []
    for i in range(n):
        records.append(
            AnthropometricRecord(
                case_id=i + 1,
                density=495.0 / (float(bodyfat[i]) + 450.0),
                bodyfat=float(bodyfat[i]),
                age=float(rng.integers(22, 75)),
                weight=float(weight[i]),
                height=float(height[i]),
                neck=float(rng.normal(38.0, 2.0)),
                chest=float(chest[i]),
                abdomen=float(abdomen[i]),
                hip=float(hip[i]),
                thigh=float(thigh[i]),
                knee=float(rng.normal(38.5, 2.0)),
                ankle=float(rng.normal(23.0, 1.5)),
                biceps=float(rng.normal(32.0, 3.0)),
                forearm=float(rng.normal(28.5, 2.0)),
                wrist=float(rng.normal(18.2, 0.9)),
            )
        )
    return records


@pytest.fixture
def synthetic_records() -> list[AnthropometricRecord]:
    return make_records()


@pytest.fixture
def synthetic_csv(tmp_path, synthetic_records) -> Path:
    return write_csv(synthetic_records, tmp_path / "cohort.csv", units="metric")


def canonical_path() -> Path:
    path = Path(os.getenv("BODYFAT_DATA", ROOT / "data" / "bodyfat.csv"))
    return path if path.is_absolute() else ROOT / path


@pytest.fixture(scope="session")
def canonical_records() -> list[AnthropometricRecord]:
    """The public body-fat dataset, downloaded on first use when absent"""
    from errors import BodyFatError
    from scripts.fetch_dataset import download_dataset

    path = canonical_path()
    if not path.is_file():
        try:
            download_dataset(path)
        except BodyFatError as e:
            pytest.skip(f"public dataset not present at {path} and could not be fetched: {e}")
    return load_csv(path, units=os.getenv("BODYFAT_UNITS", "imperial"))
