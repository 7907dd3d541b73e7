# Copyright 2025 The wptopt Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Tests for unit conversions."""

import pytest

from wptopt.core.exceptions import ValidationError
from wptopt.core.units import (
    db_to_linear,
    dbm_to_watts,
    saturation_budget,
    watts_to_dbm,
    wavelength,
)


class TestConversions:
    """Test dB and dBm conversions."""

    def test_db_to_linear(self):
        assert db_to_linear(0.0) == 1.0
        assert db_to_linear(10.0) == pytest.approx(10.0)
        assert db_to_linear(3.0) == pytest.approx(1.9953, rel=1e-4)

    def test_dbm_round_trip(self):
        assert dbm_to_watts(0.0) == pytest.approx(1e-3)
        assert dbm_to_watts(-15.0) == pytest.approx(3.1623e-5, rel=1e-4)
        assert watts_to_dbm(1e-3) == pytest.approx(0.0)

    def test_non_positive_watts(self):
        with pytest.raises(ValidationError):
            watts_to_dbm(0.0)

    def test_wavelength(self):
        assert wavelength(2.4e9) == pytest.approx(0.12491, rel=1e-4)


class TestSaturationBudget:
    """Test the receiver saturation cap."""

    def test_no_margin(self):
        assert saturation_budget(-15.0) == pytest.approx(dbm_to_watts(-15.0))

    def test_margin_subtracted(self):
        assert saturation_budget(-10.0, 1e-5) == pytest.approx(1e-4 - 1e-5)

    def test_margin_exceeds_budget(self):
        with pytest.raises(ValidationError):
            saturation_budget(-20.0, 1e-5)

    def test_negative_margin(self):
        with pytest.raises(ValidationError):
            saturation_budget(-20.0, -1.0)
