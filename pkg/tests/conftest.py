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

from typing import Optional

import numpy as np
import pytest

from wptopt.core.channel import RicianParams, draw_links
from wptopt.core.harvester import DiodeParams, DiodeTaylor, ObjectiveCoeffs, model_coeffs
from wptopt.core.units import dbm_to_watts
from wptopt.core.waveform import ToneGrid
from wptopt.optimization.qp import QpProblem, build_qp

DIODE = model_coeffs(DiodeTaylor.from_diode(DiodeParams()))
P_SAT_W = dbm_to_watts(-15.0)


def rician_instance(
    seed: int,
    n_tones: int = 8,
    p_eh_w: float = 50e-6,
    swipt: bool = False,
    coeffs: Optional[ObjectiveCoeffs] = None,
) -> QpProblem:
    """Problem on a seeded Rician channel at 8λ with the receiver at 7λ."""
    params = RicianParams.from_db(3.0, n_tones=n_tones, n_antennas=1)
    channel = draw_links(
        params,
        8.0,
        7.0 if swipt else None,
        np.random.default_rng([seed, 0]),
        np.random.default_rng([seed, 1]),
    )
    P = p_eh_w / channel.L_h
    g_eff = channel.g_eff()
    return build_qp(
        channel.h_eff(),
        coeffs or DIODE,
        P,
        swipt=(g_eff, P_SAT_W) if swipt else None,
    )


def unit_instance(h, P: float = 1.0, c2: float = 1.0, c4: float = 1.0) -> QpProblem:
    """Problem with unit-scale coefficients, for hand-checkable cases."""
    return build_qp(np.asarray(h, dtype=float), ObjectiveCoeffs(c2=c2, c4=c4), P)


@pytest.fixture
def rng():
    """Fresh seeded generator per test."""
    return np.random.default_rng(12345)


@pytest.fixture
def baseband_grid():
    """Comb whose tones sit on harmonics 1..N of the tone spacing."""
    def make(n_tones: int) -> ToneGrid:
        return ToneGrid(f0=1.25e6, delta_f=1.25e6, n_tones=n_tones)
    return make


@pytest.fixture
def diode_coeffs():
    return DIODE


@pytest.fixture
def flat_two_tone():
    """Two unit gains with Q = [[2, 4], [4, 2]] and f = [1, 1]."""
    return unit_instance([1.0, 1.0], P=1.0, c2=2.0, c4=8.0 / 3.0)
