import math

import numpy as np
import pytest

from config import NavyConstants
from errors import DomainError
from estimators.formulas import bmi, clamp_bf, navy_bf_male, siri_bf


class TestBmi:
    def test_identity_case(self):
        assert bmi(3.24, 1.8) == pytest.approx(1.0)

    def test_hand_value(self):
        assert bmi(80, 1.8) == pytest.approx(24.691358, rel=1e-6)

    def test_scale_consistency(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            w, h, k = rng.uniform(40, 150), rng.uniform(1.4, 2.1), rng.uniform(0.1, 10.0)
            assert bmi(k * w, math.sqrt(k) * h) == pytest.approx(bmi(w, h), rel=1e-12)

    @pytest.mark.parametrize("weight,height,field", [(80, 0, "height"), (0, 1.8, "weight"), (-1, 1.8, "weight")])
    def test_non_positive_names_field(self, weight, height, field):
        with pytest.raises(DomainError) as exc:
            bmi(weight, height)
        assert exc.value.field == field


class TestSiri:
    def test_zero_fat_root(self):
        assert siri_bf(1.1) == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize("density,expected", [(0.99, 50.0), (1.0, 45.0)])
    def test_hand_values(self, density, expected):
        assert siri_bf(density) == pytest.approx(expected)

    def test_strictly_decreasing(self):
        values = [siri_bf(0.95 + 0.01 * i) for i in range(20)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_decreasing_on_random_pairs(self):
        rng = np.random.default_rng(12)
        for _ in range(500):
            a, b = sorted(rng.uniform(0.801, 1.199, 2))
            if a < b:
                assert siri_bf(a) > siri_bf(b)

    @pytest.mark.parametrize("density", [0.8, 1.2, 0.5, 0.0, -1.0])
    def test_non_physiological_density(self, density):
        with pytest.raises(DomainError):
            siri_bf(density)

    def test_lenient_mode_accepts_positive_density(self):
        assert siri_bf(1.25, strict=False) == pytest.approx(495 / 1.25 - 450)
        with pytest.raises(DomainError):
            siri_bf(0.0, strict=False)

    def test_clamp(self):
        assert siri_bf(1.15, clamp=True) == 0.0
        assert siri_bf(1.15) < 0


class TestNavy:
    def test_reference_value(self):
        expected = 495 / (1.0324 - 0.19077 * math.log10(52) + 0.15456 * math.log10(180)) - 450
        assert navy_bf_male(90, 38, 180) == pytest.approx(expected)
        assert navy_bf_male(90, 38, 180) == pytest.approx(19.8, abs=0.05)

    def test_equal_waist_and_neck_rejected(self):
        with pytest.raises(DomainError) as exc:
            navy_bf_male(38, 38, 180)
        assert exc.value.field == "waist"

    def test_increasing_in_waist(self):
        assert navy_bf_male(91, 38, 180) > navy_bf_male(90, 38, 180)

    def test_decreasing_in_neck(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            waist, height = rng.uniform(70, 130), rng.uniform(150, 200)
            n1, n2 = sorted(rng.uniform(30, 45, 2))
            if n1 < n2:
                assert navy_bf_male(waist, n1, height) > navy_bf_male(waist, n2, height)

    def test_non_positive_height(self):
        with pytest.raises(DomainError):
            navy_bf_male(90, 38, 0)

    def test_custom_constants(self):
        default = navy_bf_male(90, 38, 180)
        shifted = navy_bf_male(90, 38, 180, constants=NavyConstants(c0=1.04))
        assert shifted < default


def test_clamp_bf_range():
    assert clamp_bf(-3.0) == 0.0
    assert clamp_bf(80.0) == 75.0
    assert clamp_bf(21.5) == 21.5
