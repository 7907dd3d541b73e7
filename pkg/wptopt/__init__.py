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
wptopt - globally optimal multi-tone wireless power transfer waveforms.

Computes tone amplitude allocations that maximize a non-linear energy
harvester's output under a transmit budget and an optional saturation
limit at a nearby information receiver, using two global solvers that are
cross-checked against an exhaustive KKT enumeration.
"""

from .bench.config import Scenario, ScenarioConfig, Strategy, load_config
from .bench.scenarios import SweepResult, run_scenario
from .core.channel import (
    ChannelRealization,
    RicianParams,
    draw_links,
    flat_draw,
    path_loss,
    rician_draw,
)
from .core.exceptions import (
    ConfigurationError,
    DataFormatError,
    DegenerateChannelError,
    LpError,
    ModelError,
    SolverError,
    UndersampledError,
    ValidationError,
    WptOptError,
)
from .core.harvester import (
    DiodeParams,
    DiodeTaylor,
    HarvesterModel,
    ObjectiveCoeffs,
    Poly2,
    Rational,
    RationalSimplified,
    Sigmoid,
    eval_model,
    fit_poly2,
    model_coeffs,
    report_output,
    taylor_coeffs,
)
from .core.units import db_to_linear, dbm_to_watts, saturation_budget, watts_to_dbm, wavelength
from .core.waveform import (
    ToneGrid,
    analytic_moments,
    effective_channels,
    leakage_gains,
    matched_beamformer_weights,
    numeric_moments,
    optimal_phases,
    received_power_at_ir,
)
from .optimization.lp import LpProblem, LpSolution, LpStatus, solve_lp
from .optimization.qp import (
    KktPoint,
    QpProblem,
    build_qp,
    enumerate_kkt_oracle,
    fdc_from_amplitudes,
    kkt_residual,
    objective,
)
from .optimization.solvers import (
    BaselineKind,
    Solution,
    SolverOptions,
    VariableBounds,
    baseline_alloc,
    evaluate_allocation,
    solve_bb,
    solve_milp_kkt,
    variable_bounds,
)

__version__ = "0.1.0"

__all__ = [
    # Signal model
    "ToneGrid",
    "optimal_phases",
    "matched_beamformer_weights",
    "effective_channels",
    "leakage_gains",
    "analytic_moments",
    "numeric_moments",
    "received_power_at_ir",

    # Channels
    "ChannelRealization",
    "RicianParams",
    "path_loss",
    "rician_draw",
    "draw_links",
    "flat_draw",

    # Harvester models
    "DiodeParams",
    "DiodeTaylor",
    "Poly2",
    "Sigmoid",
    "Rational",
    "RationalSimplified",
    "HarvesterModel",
    "ObjectiveCoeffs",
    "taylor_coeffs",
    "model_coeffs",
    "fit_poly2",
    "eval_model",
    "report_output",

    # Units
    "db_to_linear",
    "dbm_to_watts",
    "watts_to_dbm",
    "wavelength",
    "saturation_budget",

    # Problem and solvers
    "QpProblem",
    "KktPoint",
    "build_qp",
    "objective",
    "fdc_from_amplitudes",
    "kkt_residual",
    "enumerate_kkt_oracle",
    "LpProblem",
    "LpSolution",
    "LpStatus",
    "solve_lp",
    "Solution",
    "SolverOptions",
    "VariableBounds",
    "variable_bounds",
    "solve_bb",
    "solve_milp_kkt",
    "BaselineKind",
    "baseline_alloc",
    "evaluate_allocation",

    # Experiments
    "Scenario",
    "ScenarioConfig",
    "Strategy",
    "SweepResult",
    "load_config",
    "run_scenario",

    # Exceptions
    "WptOptError",
    "ValidationError",
    "DegenerateChannelError",
    "UndersampledError",
    "ModelError",
    "LpError",
    "SolverError",
    "ConfigurationError",
    "DataFormatError",
]
