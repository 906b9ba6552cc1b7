"""
Closed-form Estimators - BMI, Siri's equation, U.S. Navy (male)

Units are canonical SI-ish and never converted here:
weight kg, BMI height m, Navy lengths cm, density g/cm³.
"""
import math
from typing import Optional

from config import NavyConstants
from errors import DomainError

BF_MIN = 0.0
BF_MAX = 75.0

# Physiological density window, exclusive
DENSITY_MIN = 0.8
DENSITY_MAX = 1.2


def _require_positive(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise DomainError(f"{name} must be positive, got {value}", field=name)
    return value


def clamp_bf(value: float) -> float:
    """Clamp a body-fat percentage to the reporting range [0, 75]"""
    return min(BF_MAX, max(BF_MIN, value))


def bmi(weight: float, height: float) -> float:
    """Body Mass Index, weight (kg) / height (m) squared"""
    weight = _require_positive(weight, "weight")
    height = _require_positive(height, "height")
    return weight / (height * height)


def siri_bf(density: float, clamp: bool = False, strict: bool = True) -> float:
    """
    Siri's equation: BF% = 495 / density - 450.

    strict requires a physiological density in (0.8, 1.2) g/cm³;
    otherwise only density > 0 is required.
    """
    density = _require_positive(density, "density")
    if strict and not DENSITY_MIN < density < DENSITY_MAX:
        raise DomainError(
            f"density {density} g/cm³ outside physiological range "
            f"({DENSITY_MIN}, {DENSITY_MAX})",
            field="density",
        )
    value = 495.0 / density - 450.0
    return clamp_bf(value) if clamp else value


def navy_bf_male(
    waist: float,
    neck: float,
    height: float,
    clamp: bool = False,
    constants: Optional[NavyConstants] = None,
) -> float:
    """
    U.S. Navy circumference method, male, metric form (all inputs cm).

    BF% = 495 / (c0 - c1*log10(waist - neck) + c2*log10(height)) - 450
    """
    c = constants or NavyConstants()
    neck = _require_positive(neck, "neck")
    waist = _require_positive(waist, "waist")
    height = _require_positive(height, "height")
    if waist <= neck:
        raise DomainError(
            f"waist ({waist} cm) must exceed neck ({neck} cm)", field="waist"
        )
    density = c.c0 - c.c1 * math.log10(waist - neck) + c.c2 * math.log10(height)
    if density <= 0:
        raise DomainError(f"navy density term non-positive ({density})", field="waist")
    value = 495.0 / density - 450.0
    return clamp_bf(value) if clamp else value
