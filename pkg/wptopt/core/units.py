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

"""Unit conversions shared by the channel, harvester and bench layers."""

import math

from scipy.constants import c as SPEED_OF_LIGHT

from .exceptions import ValidationError


def db_to_linear(value_db: float) -> float:
    """Convert a power ratio in dB to linear scale."""
    return float(10.0 ** (value_db / 10.0))


def dbm_to_watts(value_dbm: float) -> float:
    """Convert a power level in dBm to watts."""
    return float(10.0 ** (value_dbm / 10.0) * 1e-3)


def watts_to_dbm(value_w: float) -> float:
    """Convert a power level in watts to dBm."""
    if value_w <= 0:
        raise ValidationError("power must be positive to express in dBm", "value_w", value_w)
    return 10.0 * math.log10(value_w / 1e-3)


def wavelength(frequency_hz: float) -> float:
    """Free-space wavelength in metres at the given frequency."""
    if frequency_hz <= 0:
        raise ValidationError("frequency must be positive", "frequency_hz", frequency_hz)
    return float(SPEED_OF_LIGHT / frequency_hz)


def saturation_budget(p_1db_dbm: float, epsilon_w: float = 0.0) -> float:
    """
    Received-power cap for the information receiver in watts.

    The cap is the LNA 1-dB compression point less the average power the
    legitimate information signal already delivers.

    Args:
        p_1db_dbm: LNA 1-dB compression point in dBm.
        epsilon_w: Power received from the information link in watts.

    Returns:
        P_sat in watts.

    Raises:
        ValidationError: If epsilon is negative or consumes the whole budget.
    """
    if epsilon_w < 0:
        raise ValidationError("information-link margin must be non-negative", "epsilon_w", epsilon_w)
    p_sat = dbm_to_watts(p_1db_dbm) - epsilon_w
    if p_sat <= 0:
        raise ValidationError(
            "information-link margin exceeds the compression point",
            "epsilon_w",
            epsilon_w,
        )
    return p_sat
