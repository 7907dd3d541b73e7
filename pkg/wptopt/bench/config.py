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

"""
Scenario configuration.

Powers on the sweep axis are given in µW as P_EH, the power available at
the harvester (transmit power times path loss). Saturation powers are in
dBm and distances in wavelengths.
"""

import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

from ..core.exceptions import ConfigurationError
from ..core.harvester import DiodeParams, Poly2
from ..core.units import dbm_to_watts, saturation_budget
from ..core.waveform import ToneGrid


class Scenario(str, Enum):
    ALLOC_SINGLE_REALIZATION = "alloc_single_realization"
    SWEEP_POWER = "sweep_power"
    FLAT_CHANNEL = "flat_channel"
    MISO_SWEEP = "miso_sweep"
    SWIPT_POWER = "swipt_power"
    SWIPT_PSAT = "swipt_psat"
    SWIPT_DISTANCE = "swipt_distance"
    CURVEFIT_COMPARE = "curvefit_compare"


class Strategy(str, Enum):
    OPTIMAL = "optimal"
    """Finite branch-and-bound."""

    MILP = "milp"
    """Mixed-integer KKT reformulation."""

    OPTIMAL_UNCONSTRAINED = "optimal_unconstrained"
    """Branch-and-bound without the saturation row."""

    EQUAL = "equal"
    MRT = "mrt"
    SINGLE = "single"


SWIPT_SCENARIOS = frozenset({Scenario.SWIPT_POWER, Scenario.SWIPT_PSAT, Scenario.SWIPT_DISTANCE})

DEFAULT_STRATEGIES = [Strategy.OPTIMAL, Strategy.MILP, Strategy.EQUAL, Strategy.MRT, Strategy.SINGLE]
DEFAULT_SWIPT_STRATEGIES = [Strategy.OPTIMAL, Strategy.OPTIMAL_UNCONSTRAINED]


class ScenarioConfig(BaseModel):
    """Everything a benchmark run depends on besides the code itself."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    scenario: Scenario = Scenario.SWEEP_POWER
    n_tones: int = Field(default=8, ge=1)
    antennas: List[int] = Field(default_factory=lambda: [1], min_length=1)
    """Antenna counts; only miso_sweep uses more than the first entry."""

    f0_hz: PositiveFloat = 2.4e9
    """Frequency of the first tone. Distances are in wavelengths, so it only labels the tones."""

    delta_f_hz: PositiveFloat = 1.25e6
    """Tone spacing; labels the tones like f0_hz."""

    p_eh_uw: List[PositiveFloat] = Field(default_factory=lambda: [10.0, 25.0, 50.0, 75.0, 100.0], min_length=1)
    """Sweep grid of P_EH in µW."""

    fixed_p_eh_uw: PositiveFloat = 100.0
    """P_EH held fixed by the saturation-power and distance sweeps."""

    alloc_p_eh_uw: PositiveFloat = 50.0
    """P_EH of the single-realization allocation snapshot."""

    d_h: PositiveFloat = 8.0
    d_g: PositiveFloat = 7.0
    d_g_grid: List[PositiveFloat] = Field(default_factory=lambda: [6.0, 7.0, 8.0, 10.0], min_length=1)
    kappa_db: float = 3.0

    p_sat_dbm: float = -15.0
    p_sat_dbm_grid: List[float] = Field(
        default_factory=lambda: [-25.0, -20.0, -15.0, -10.0, -5.0, 0.0, 5.0], min_length=1
    )
    info_margin_w: float = Field(default=0.0, ge=0)
    """Power already delivered by the information link, subtracted from P_1dB."""

    swipt: bool = False
    """Add the saturation row to sweep_power and the allocation snapshot."""

    model: Literal["diode", "poly2"] = "diode"
    diode: DiodeParams = Field(default_factory=DiodeParams)
    poly2: Poly2 = Field(default_factory=lambda: Poly2(beta1=1200.0, beta2=0.2, beta3=-2e-7))
    poly2_samples: Optional[Path] = None
    """CSV of (p_in_w, p_out_w) samples; when set, the second-order model is fitted from it."""

    flat_variance: float = Field(default=0.05, ge=0)
    """Variance of the near-flat channel gains, which are drawn as N(1, flat_variance)."""

    realizations: int = Field(default=500, ge=1)
    seed: int = Field(default=2019, ge=0)
    strategies: Optional[List[Strategy]] = None
    workers: int = Field(default=1, ge=1)
    node_limit: int = Field(default=100_000, ge=1)

    @field_validator("antennas")
    @classmethod
    def _positive_antennas(cls, value: List[int]) -> List[int]:
        if any(m < 1 for m in value):
            raise ValueError("antenna counts must be positive")
        return value

    @model_validator(mode="after")
    def _margin_below_compression(self) -> "ScenarioConfig":
        levels = [self.p_sat_dbm] + (self.p_sat_dbm_grid if self.scenario is Scenario.SWIPT_PSAT else [])
        lowest = min(levels)
        if self.info_margin_w >= dbm_to_watts(lowest):
            raise ConfigurationError(
                f"info_margin_w = {self.info_margin_w:g} W leaves no saturation budget at {lowest:g} dBm",
                key="info_margin_w",
            )
        return self

    @property
    def p_sat_w(self) -> float:
        """Saturation power in watts."""
        return saturation_budget(self.p_sat_dbm, self.info_margin_w)

    @property
    def tone_grid(self) -> ToneGrid:
        """Frequency comb of the simulated waveform."""
        return ToneGrid(f0=self.f0_hz, delta_f=self.delta_f_hz, n_tones=self.n_tones)

    def resolved_strategies(self) -> List[Strategy]:
        if self.strategies is not None:
            return list(self.strategies)
        if self.scenario in SWIPT_SCENARIOS:
            return list(DEFAULT_SWIPT_STRATEGIES)
        return list(DEFAULT_STRATEGIES)

    def with_overrides(self, **overrides: Any) -> "ScenarioConfig":
        """Copy with the given fields replaced; None values are ignored."""
        data = self.model_dump()
        data.update({key: value for key, value in overrides.items() if value is not None})
        return parse_config(data)


def parse_config(data: Union[Dict[str, Any], None]) -> ScenarioConfig:
    """
    Validate a configuration mapping.

    Raises:
        ConfigurationError: Naming the first offending key.
    """
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError("configuration must be a JSON object")
    try:
        return ScenarioConfig.model_validate(data)
    except PydanticValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"])
        raise ConfigurationError(f"invalid configuration key '{key}': {first['msg']}", key=key, cause=e) from e


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    """
    Read a scenario configuration from a JSON file.

    Missing keys take their defaults and unknown keys are rejected.

    Raises:
        ConfigurationError: If the file cannot be read or parsed, or violates the schema.
    """
    config_path = Path(path)
    try:
        text = config_path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"cannot read configuration {config_path}", cause=e) from e
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"configuration {config_path} is not valid JSON: {e.msg}", cause=e) from e
    return parse_config(data)
