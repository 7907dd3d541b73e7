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

"""Tests for the multi-tone signal algebra."""

import math

import numpy as np
import pytest

from wptopt.core.exceptions import DegenerateChannelError, UndersampledError, ValidationError
from wptopt.core.waveform import (
    ToneGrid,
    analytic_moments,
    effective_channels,
    leakage_gains,
    matched_beamformer_weights,
    numeric_moments,
    optimal_phases,
    received_power_at_ir,
)


class TestToneGrid:
    """Test the frequency comb."""

    def test_frequencies(self):
        grid = ToneGrid(f0=2.4e9, delta_f=1.25e6, n_tones=4)
        np.testing.assert_allclose(grid.frequencies(), [2.4e9, 2.40125e9, 2.4025e9, 2.40375e9])
        assert grid.period == pytest.approx(8e-7)

    def test_harmonic_indices_of_default_comb(self):
        grid = ToneGrid()
        assert grid.harmonic_indices()[0] == 1920
        assert len(grid.harmonic_indices()) == 8

    def test_off_comb_carrier_rejected(self):
        grid = ToneGrid(f0=1.3e6, delta_f=1e6, n_tones=2)
        with pytest.raises(ValidationError):
            grid.harmonic_indices()

    def test_invalid_parameters_rejected(self):
        with pytest.raises(ValidationError):
            ToneGrid(f0=-1.0)
        with pytest.raises(ValidationError):
            ToneGrid(n_tones=0)


class TestOptimalPhases:
    """Test phase alignment."""

    def test_zero_phases(self):
        np.testing.assert_array_equal(optimal_phases([0.0, 0.0]), [0.0, 0.0])

    def test_negation(self):
        np.testing.assert_allclose(optimal_phases([math.pi / 3]), [-math.pi / 3])

    def test_aligned_phases_maximize_fourth_moment(self, rng, baseband_grid):
        grid = baseband_grid(4)
        s = rng.uniform(0.1, 1.0, 4)
        h = rng.uniform(0.1, 1.0, 4)
        psi = rng.uniform(-math.pi, math.pi, 4)
        # Received phase of tone n is φ_n + ψ_n.
        m2_star, m4_star = numeric_moments(s, h, optimal_phases(psi) + psi, grid)
        for _ in range(100):
            phi = rng.uniform(-math.pi, math.pi, 4)
            m2, m4 = numeric_moments(s, h, phi + psi, grid)
            assert m4 <= m4_star + 1e-9
            assert abs(m2 - m2_star) <= 1e-9


class TestMatchedBeamformer:
    """Test matched beamforming weights."""

    def test_single_antenna(self):
        np.testing.assert_allclose(matched_beamformer_weights([1.0], 2.0), [2.0])

    def test_two_antennas(self):
        h = np.array([3.0, 4.0j])
        w = matched_beamformer_weights(h, 1.0)
        np.testing.assert_allclose(w, [0.6, -0.8j])
        assert h @ w == pytest.approx(5.0)
        assert np.linalg.norm(w) == pytest.approx(1.0)

    def test_maximizes_gain_over_random_unit_vectors(self, rng):
        h = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        gain = abs(h @ matched_beamformer_weights(h, 1.0))
        for _ in range(1000):
            w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            w /= np.linalg.norm(w)
            assert abs(h @ w) <= gain + 1e-12

    def test_zero_row_is_degenerate(self):
        with pytest.raises(DegenerateChannelError, match="degenerate channel"):
            matched_beamformer_weights([0.0, 0.0], 1.0)

    def test_negative_amplitude_rejected(self):
        with pytest.raises(ValidationError):
            matched_beamformer_weights([1.0], -1.0)


class TestEffectiveChannels:
    """Test the MISO to scalar collapse."""

    def test_row_norms(self):
        np.testing.assert_allclose(effective_channels([[3.0, 4.0]]), [5.0])
        np.testing.assert_allclose(effective_channels([[1.0, 0.0], [0.0, 2.0]]), [1.0, 2.0])

    def test_single_antenna_magnitude(self):
        np.testing.assert_allclose(effective_channels([[0.7 * np.exp(1j * 0.3)]]), [0.7])

    def test_leakage_single_antenna_is_magnitude(self):
        h = np.array([[1.0 + 1.0j], [0.5j]])
        g = np.array([[0.3 - 0.4j], [2.0]])
        np.testing.assert_allclose(leakage_gains(h, g), [0.5, 2.0])

    def test_leakage_orthogonal_receiver(self):
        np.testing.assert_allclose(leakage_gains([[1.0, 0.0]], [[0.0, 1.0]]), [0.0])


class TestMoments:
    """Test analytic and numeric signal moments."""

    def test_single_tone(self):
        assert analytic_moments([math.sqrt(2.0)], [1.0]) == pytest.approx((1.0, 1.5))

    def test_two_tones(self):
        assert analytic_moments([1.0, 1.0], [1.0, 1.0]) == pytest.approx((1.0, 2.25))

    def test_numeric_single_tone(self, baseband_grid):
        m2, m4 = numeric_moments([math.sqrt(2.0)], [1.0], [0.0], baseband_grid(1))
        assert m2 == pytest.approx(1.0, abs=1e-9)
        assert m4 == pytest.approx(1.5, abs=1e-9)

    def test_analytic_matches_numeric(self, rng, baseband_grid):
        for n in (1, 2):
            s = rng.uniform(0.0, 2.0, n)
            h = rng.uniform(0.0, 2.0, n)
            analytic = analytic_moments(s, h)
            numeric = numeric_moments(s, h, np.zeros(n), baseband_grid(n))
            np.testing.assert_allclose(numeric, analytic, rtol=1e-9)

    def test_intermodulation_raises_fourth_moment(self, rng, baseband_grid):
        for n in range(3, 9):
            s = rng.uniform(0.1, 2.0, n)
            h = rng.uniform(0.1, 2.0, n)
            m2, m4 = analytic_moments(s, h)
            numeric_m2, numeric_m4 = numeric_moments(s, h, np.zeros(n), baseband_grid(n))
            assert numeric_m2 == pytest.approx(m2, rel=1e-9)
            assert numeric_m4 > m4

    def test_three_tone_intermodulation(self, baseband_grid):
        # Harmonics 1, 2, 3: 1 + 3 = 2 + 2 and 1 + 1 + 1 = 3 add 1.5 + 0.5.
        assert analytic_moments(np.ones(3), np.ones(3)) == pytest.approx((1.5, 5.625))
        m2, m4 = numeric_moments(np.ones(3), np.ones(3), np.zeros(3), baseband_grid(3))
        assert m2 == pytest.approx(1.5, rel=1e-12)
        assert m4 == pytest.approx(7.625, rel=1e-12)

    def test_carrier_scale_comb(self, rng):
        grid = ToneGrid(n_tones=2)
        s = rng.uniform(0.5, 1.0, 2)
        h = rng.uniform(0.5, 1.0, 2)
        k_max = int(grid.harmonic_indices()[-1])
        numeric = numeric_moments(s, h, np.zeros(2), grid, n_samples=8 * k_max)
        np.testing.assert_allclose(numeric, analytic_moments(s, h), rtol=1e-9)

    def test_undersampling_rejected(self, baseband_grid):
        with pytest.raises(UndersampledError, match="undersampled"):
            numeric_moments([1.0, 1.0], [1.0, 1.0], [0.0, 0.0], baseband_grid(2), n_samples=8)

    def test_scaling(self, rng):
        s = rng.uniform(0.0, 1.0, 5)
        h = rng.uniform(0.0, 1.0, 5)
        m2, m4 = analytic_moments(s, h)
        scaled = analytic_moments(3.0 * s, h)
        assert scaled == pytest.approx((9.0 * m2, 81.0 * m4), rel=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            analytic_moments([1.0, 2.0], [1.0])


class TestReceivedPower:
    """Test power at the information receiver."""

    def test_examples(self):
        assert received_power_at_ir([math.sqrt(2.0)], [1.0]) == pytest.approx(1.0)
        assert received_power_at_ir([1.0, 1.0], [0.0, 1.0]) == pytest.approx(0.5)

    def test_equals_second_moment(self, rng):
        s = rng.uniform(0.0, 1.0, 6)
        h = rng.uniform(0.0, 1.0, 6)
        assert received_power_at_ir(s, h) == pytest.approx(analytic_moments(s, h)[0], rel=1e-14)
