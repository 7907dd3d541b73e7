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


"""Tests for scenario configuration."""

import json

import numpy as np
import pytest

from wptopt.bench.config import (
    Scenario,
    ScenarioConfig,
    Strategy,
    load_config,
    parse_config,
)
from wptopt.core.exceptions import ConfigurationError
from wptopt.core.units import dbm_to_watts


class TestScenarioConfig:
    """Test defaults and derived values."""

    def test_defaults(self):
        cfg = ScenarioConfig()
        assert cfg.scenario is Scenario.SWEEP_POWER
        assert cfg.n_tones == 8
        assert cfg.realizations == 500
        assert cfg.seed == 2019
        assert cfg.flat_variance == 0.05
        assert cfg.p_sat_w == pytest.approx(dbm_to_watts(-15.0))

    def test_default_strategies(self):
        assert ScenarioConfig().resolved_strategies() == [
            Strategy.OPTIMAL,
            Strategy.MILP,
            Strategy.EQUAL,
            Strategy.MRT,
            Strategy.SINGLE,
        ]

    def test_saturation_scenarios_compare_with_unconstrained(self):
        cfg = ScenarioConfig(scenario="swipt_psat")
        assert cfg.resolved_strategies() == [Strategy.OPTIMAL, Strategy.OPTIMAL_UNCONSTRAINED]

    def test_explicit_strategies(self):
        cfg = ScenarioConfig(strategies=["equal"])
        assert cfg.resolved_strategies() == [Strategy.EQUAL]

    def test_overrides_ignore_none(self):
        cfg = ScenarioConfig().with_overrides(seed=7, realizations=None)
        assert cfg.seed == 7
        assert cfg.realizations == 500

    def test_frozen(self):
        with pytest.raises(ValueError):
            ScenarioConfig().seed = 3

    def test_tone_grid(self):
        grid = ScenarioConfig(n_tones=4, f0_hz=5.8e9, delta_f_hz=2.5e6).tone_grid
        np.testing.assert_allclose(grid.frequencies(), 5.8e9 + 2.5e6 * np.arange(4))
        assert grid.harmonic_indices()[0] == 2320

    def test_margin_subtracted(self):
        cfg = ScenarioConfig(p_sat_dbm=-10.0, info_margin_w=1e-5)
        assert cfg.p_sat_w == pytest.approx(9e-5)

    def test_margin_checked_against_whole_saturation_grid(self):
        assert ScenarioConfig(info_margin_w=1e-5).p_sat_w > 0
        with pytest.raises(ConfigurationError, match="-25 dBm"):
            ScenarioConfig(scenario="swipt_psat", info_margin_w=1e-5)


class TestParseConfig:
    """Test validation errors name the offending key."""

    @pytest.mark.parametrize(
        "data, key",
        [
            ({"realizations": 0}, "realizations"),
            ({"p_eh_uw": []}, "p_eh_uw"),
            ({"p_eh_uw": [10.0, -1.0]}, "p_eh_uw.1"),
            ({"scenario": "sweep_everything"}, "scenario"),
            ({"antennas": [1, 0]}, "antennas"),
            ({"unknown_key": 1}, "unknown_key"),
            ({"diode": {"i_s": -1.0}}, "diode.i_s"),
            ({"info_margin_w": 1.0}, "info_margin_w"),
            ({"scenario": "swipt_psat", "info_margin_w": 1e-4}, "info_margin_w"),
        ],
    )
    def test_invalid_key(self, data, key):
        with pytest.raises(ConfigurationError) as excinfo:
            parse_config(data)
        assert excinfo.value.key == key
        assert key in str(excinfo.value)

    def test_not_a_mapping(self):
        with pytest.raises(ConfigurationError):
            parse_config([1, 2, 3])

    def test_none_gives_defaults(self):
        assert parse_config(None) == ScenarioConfig()


class TestLoadConfig:
    """Test reading configuration files."""

    def test_round_trip(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"scenario": "flat_channel", "n_tones": 4, "realizations": 3}))
        cfg = load_config(path)
        assert cfg.scenario is Scenario.FLAT_CHANNEL
        assert cfg.n_tones == 4

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("")
        assert load_config(path) == ScenarioConfig()

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="cannot read"):
            load_config(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{realizations: 3")
        with pytest.raises(ConfigurationError, match="not valid JSON"):
            load_config(path)
