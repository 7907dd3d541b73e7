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


"""Tests for the Monte Carlo scenario runner on small configurations."""

import numpy as np
import pytest

from wptopt.bench.config import ScenarioConfig
from wptopt.bench.scenarios import run_scenario, stream

SMALL = {"n_tones": 4, "realizations": 3, "p_eh_uw": [10.0, 50.0]}


def small_config(**overrides) -> ScenarioConfig:
    return ScenarioConfig(**{**SMALL, **overrides})


class TestStreams:
    """Test per-realization random streams."""

    def test_reproducible(self):
        np.testing.assert_array_equal(stream(5, 2, 0).random(4), stream(5, 2, 0).random(4))

    def test_links_differ(self):
        assert not np.array_equal(stream(5, 2, 0).random(4), stream(5, 2, 1).random(4))

    def test_antenna_key_differs(self):
        assert not np.array_equal(stream(5, 2, 0, 1).random(4), stream(5, 2, 0, 2).random(4))


@pytest.fixture(scope="module")
def power_sweep():
    return run_scenario(small_config())


class TestSweepPower:
    """Test the power sweep."""

    def test_grid_and_strategies(self, power_sweep):
        assert power_sweep.axis == "p_eh_w"
        assert len(power_sweep.points) == 2 * 5
        assert {point.strategy for point in power_sweep.points} == {"optimal", "milp", "equal", "mrt", "single"}
        assert not power_sweep.has_flags

    def test_solvers_agree(self, power_sweep):
        for optimal, milp in zip(power_sweep.curve("optimal"), power_sweep.curve("milp")):
            assert optimal.mean_objective == pytest.approx(milp.mean_objective, rel=1e-8)

    def test_optimal_dominates(self, power_sweep):
        for p_eh in (10e-6, 50e-6):
            best = power_sweep.point(p_eh, "optimal").mean_objective
            for strategy in ("equal", "mrt", "single"):
                assert power_sweep.point(p_eh, strategy).mean_objective <= best * (1 + 1e-9)

    def test_output_grows_with_power(self, power_sweep):
        curve = power_sweep.curve("optimal")
        assert curve[1].mean_objective > curve[0].mean_objective

    def test_workers_do_not_change_results(self, power_sweep):
        threaded = run_scenario(small_config(workers=3))
        assert threaded.points == power_sweep.points


class TestOutputs:
    """Test files written by a run."""

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg = small_config(strategies=["optimal", "equal"])
        first = run_scenario(cfg, tmp_path / "a")
        second = run_scenario(cfg, tmp_path / "b")
        assert [path.name for path in first.files] == ["sweep.csv"]
        assert first.files[0].read_bytes() == second.files[0].read_bytes()

    def test_allocation_snapshot(self, tmp_path):
        cfg = small_config(scenario="alloc_single_realization", strategies=["optimal", "equal"])
        result = run_scenario(cfg, tmp_path)
        assert [path.name for path in result.files] == ["sweep.csv", "alloc.csv"]
        assert len(result.allocation) == 2 * 4
        optimal = [row.x_over_2p for row in result.allocation if row.strategy == "optimal"]
        assert sum(optimal) == pytest.approx(1.0, rel=1e-9)
        assert max(row.h_norm for row in result.allocation) == 1.0
        frequencies = sorted({row.frequency_hz for row in result.allocation})
        np.testing.assert_allclose(frequencies, 2.4e9 + 1.25e6 * np.arange(4))


class TestOtherScenarios:
    """Test axis naming and labels of the remaining scenarios."""

    def test_saturation_sweep(self):
        result = run_scenario(small_config(scenario="swipt_psat", p_sat_dbm_grid=[-25.0, 5.0]))
        assert result.axis == "p_sat_dbm"
        for p_sat in (-25.0, 5.0):
            constrained = result.point(p_sat, "optimal").mean_objective
            unconstrained = result.point(p_sat, "optimal_unconstrained").mean_objective
            assert constrained <= unconstrained * (1 + 1e-9)

    def test_distance_sweep(self):
        result = run_scenario(small_config(scenario="swipt_distance", d_g_grid=[6.0, 10.0]))
        assert result.axis == "d_g_wavelengths"
        assert len(result.curve("optimal")) == 2

    def test_antenna_labels(self):
        result = run_scenario(small_config(scenario="miso_sweep", antennas=[1, 2], strategies=["optimal"]))
        assert {point.strategy for point in result.points} == {"optimal_m1", "optimal_m2"}

    def test_flat_channel(self):
        result = run_scenario(small_config(scenario="flat_channel", strategies=["optimal", "single"]))
        assert len(result.points) == 4

    def test_curvefit_compare(self, tmp_path):
        cfg = small_config(scenario="curvefit_compare", strategies=["optimal"])
        result = run_scenario(cfg, tmp_path)
        assert {point.strategy for point in result.points} == {"diode_optimal", "poly2_optimal"}
        assert [row.realizations for row in result.support] == [3, 3]
        assert all(0.0 <= row.fraction <= 1.0 for row in result.support)
        assert (tmp_path / "support.csv").exists()

    def test_fitted_model_from_samples(self, tmp_path):
        p_in = np.linspace(1e-6, 1e-4, 20)
        samples = tmp_path / "samples.csv"
        samples.write_text(
            "p_in_w,p_out_w\n" + "".join(f"{x:.17g},{1500.0 * x**2 + 0.25 * x:.17g}\n" for x in p_in)
        )
        cfg = small_config(model="poly2", poly2_samples=samples, strategies=["optimal"])
        assert not run_scenario(cfg).has_flags


class TestFailures:
    """Test that failing solves are flagged rather than aborting the run."""

    def test_node_limit_flags_realizations(self):
        cfg = small_config(n_tones=8, realizations=5, strategies=["optimal", "equal"], node_limit=1)
        result = run_scenario(cfg)
        assert result.has_flags
        assert all(flag.strategy == "optimal" for flag in result.flagged)
        assert all("node limit" in flag.reason for flag in result.flagged)
        assert len(result.curve("equal")) == 2
