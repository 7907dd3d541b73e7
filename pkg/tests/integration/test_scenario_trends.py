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


"""Qualitative curve shapes of the benchmark scenarios."""

import math

import pytest

from wptopt.bench.cli import main
from wptopt.bench.config import Scenario, ScenarioConfig
from wptopt.bench.scenarios import SweepResult, run_scenario

pytestmark = pytest.mark.integration

SLACK = 1e-8


def run(**fields) -> SweepResult:
    result = run_scenario(ScenarioConfig(**fields))
    assert not result.has_flags
    return result


def assert_non_decreasing(result: SweepResult, strategy: str) -> None:
    curve = result.curve(strategy)
    assert len(curve) > 1
    for lower, upper in zip(curve, curve[1:]):
        assert upper.mean_objective >= lower.mean_objective * (1 - SLACK), (lower.axis_value, upper.axis_value)


class TestPowerSweep:
    def test_monotone_in_harvested_power(self):
        result = run(realizations=20, strategies=["optimal", "equal"])
        assert_non_decreasing(result, "optimal")
        assert_non_decreasing(result, "equal")


@pytest.fixture(scope="module")
def psat():
    return run(
        scenario="swipt_psat",
        realizations=500,
        p_sat_dbm_grid=[-25.0, -15.0, -5.0, 5.0, 20.0],
    )


class TestSwiptTrends:
    """Saturation and distance sweeps at a fixed harvested power."""

    def test_monotone_in_saturation_power(self, psat):
        assert psat.axis == "p_sat_dbm"
        assert_non_decreasing(psat, "optimal")

    def test_never_above_unconstrained(self, psat):
        for point in psat.curve("optimal"):
            unconstrained = psat.point(point.axis_value, "optimal_unconstrained")
            assert point.mean_objective <= unconstrained.mean_objective * (1 + SLACK)

    def test_coincides_with_unconstrained_when_slack(self, psat):
        constrained = psat.point(20.0, "optimal").mean_objective
        unconstrained = psat.point(20.0, "optimal_unconstrained").mean_objective
        assert constrained == pytest.approx(unconstrained, rel=SLACK)

    def test_monotone_in_receiver_distance(self):
        result = run(scenario="swipt_distance", realizations=500, d_g_grid=[6.0, 8.0, 10.0])
        assert result.axis == "d_g_wavelengths"
        assert_non_decreasing(result, "optimal")


class TestMisoTrend:
    def test_strictly_increasing_in_antennas(self):
        result = run(
            scenario="miso_sweep",
            realizations=500,
            antennas=[1, 2, 4],
            p_eh_uw=[50.0],
            strategies=["optimal"],
        )
        points = [result.point(50e-6, f"optimal_m{m}") for m in (1, 2, 4)]
        for fewer, more in zip(points, points[1:]):
            combined = math.hypot(fewer.stderr, more.stderr)
            assert more.mean_objective - fewer.mean_objective > 3 * combined


class TestFlatChannel:
    """Near-flat channels favour spreading power over tones."""

    def test_exactly_flat_channel_splits_equally(self):
        result = run(
            scenario="flat_channel",
            realizations=3,
            flat_variance=0.0,
            p_eh_uw=[100.0, 200.0],
            strategies=["optimal", "equal", "mrt", "single"],
        )
        for p_eh in (100e-6, 200e-6):
            optimal = result.point(p_eh, "optimal").mean_objective
            single = result.point(p_eh, "single").mean_objective
            assert result.point(p_eh, "equal").mean_objective == pytest.approx(optimal, rel=1e-9)
            assert result.point(p_eh, "mrt").mean_objective == pytest.approx(optimal, rel=1e-9)
            assert single < optimal

    def test_optimum_spreads_at_default_variance(self):
        cfg = ScenarioConfig(
            scenario="flat_channel",
            realizations=30,
            p_eh_uw=[100.0, 200.0],
            strategies=["optimal", "equal", "mrt", "single"],
        )
        assert cfg.flat_variance == 0.05
        result = run_scenario(cfg)
        assert not result.has_flags
        for p_eh in (100e-6, 200e-6):
            optimal = result.point(p_eh, "optimal")
            for strategy in ("equal", "mrt", "single"):
                assert result.point(p_eh, strategy).mean_objective <= optimal.mean_objective * (1 + SLACK)
            assert optimal.mean_objective > result.point(p_eh, "single").mean_objective * (1 + 1e-6)


class TestCurveFitEquivalence:
    def test_same_support_on_first_realization(self):
        result = run(scenario="curvefit_compare", realizations=1, p_eh_uw=[50.0], strategies=["optimal"])
        assert len(result.support) == 1
        agreement = result.support[0]
        assert agreement.axis_value == pytest.approx(50e-6)
        assert (agreement.fraction, agreement.realizations) == (1.0, 1)

    def test_support_agrees_on_most_realizations(self):
        result = run(scenario="curvefit_compare", realizations=100, p_eh_uw=[50.0], strategies=["optimal"])
        [agreement] = result.support
        assert agreement.realizations == 100
        assert agreement.fraction >= 0.9


@pytest.mark.parametrize("scenario", [s.value for s in Scenario])
def test_cli_rerun_is_byte_identical(scenario, tmp_path):
    config = tmp_path / "config.json"
    config.write_text('{"n_tones": 4, "realizations": 2, "p_eh_uw": [10.0, 50.0], "antennas": [1, 2]}')
    outputs = []
    for run_dir in ("first", "second"):
        out = tmp_path / run_dir
        assert main(["bench", "--scenario", scenario, "--config", str(config), "--seed", "7", "--out", str(out)]) == 0
        outputs.append({path.name: path.read_bytes() for path in sorted(out.iterdir())})
    assert outputs[0] == outputs[1]
    assert "sweep.csv" in outputs[0]
