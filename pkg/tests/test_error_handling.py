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


"""Tests for the exception hierarchy and error context."""

import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from tests.conftest import DIODE, rician_instance
from wptopt.bench.config import parse_config
from wptopt.core.channel import ChannelRealization, RicianParams
from wptopt.core.exceptions import (
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
from wptopt.core.harvester import fit_poly2
from wptopt.core.waveform import ToneGrid, matched_beamformer_weights
from wptopt.optimization.lp import LpProblem, make_lp
from wptopt.optimization.qp import KktPoint, QpProblem, build_qp
from wptopt.optimization.solvers import SolverOptions, solve_bb


class TestHierarchy:
    """Test that every error derives from WptOptError."""

    @pytest.mark.parametrize(
        "error",
        [
            ValidationError("bad", "field", 1),
            DegenerateChannelError("zero"),
            UndersampledError("alias"),
            ModelError("pole"),
            LpError("malformed"),
            SolverError("limit"),
            ConfigurationError("key", key="seed"),
            DataFormatError("header", path="x.csv"),
        ],
    )
    def test_base_class(self, error):
        assert isinstance(error, WptOptError)
        assert error.details is not None

    def test_validation_context(self):
        error = ValidationError("must be positive", "P", -1.0)
        assert error.field_name == "P"
        assert error.field_value == -1.0
        assert str(error) == "must be positive"


class TestErrorContext:
    """Test the context attached by raising code."""

    def test_degenerate_channel(self):
        with pytest.raises(DegenerateChannelError, match="degenerate channel"):
            matched_beamformer_weights(np.zeros(2), 1.0)

    def test_lp_error_keeps_cause(self):
        with pytest.raises(LpError) as excinfo:
            make_lp(c=[1.0], lower=[-np.inf])
        assert isinstance(excinfo.value.cause, ValueError)
        assert excinfo.value.__cause__ is excinfo.value.cause

    def test_configuration_error_keeps_cause(self):
        with pytest.raises(ConfigurationError) as excinfo:
            parse_config({"seed": -1})
        assert excinfo.value.key == "seed"
        assert excinfo.value.cause is not None

    def test_model_error_details(self):
        with pytest.raises(ModelError) as excinfo:
            fit_poly2([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        assert excinfo.value.details == {"distinct": 1}

    def test_solver_error_carries_incumbent(self):
        for seed in range(10):
            p = rician_instance(seed)
            explored = solve_bb(p).stats.nodes_explored
            if explored > 2:
                break
        with pytest.raises(SolverError) as excinfo:
            solve_bb(p, SolverOptions(node_limit=explored - 1))
        error = excinfo.value
        assert error.gap is not None and error.gap >= 0
        if error.incumbent is not None:
            assert isinstance(error.incumbent, KktPoint)
            assert error.incumbent.x.shape == (p.n_tones,)


class TestConstructorErrors:
    """Test that invalid domain records raise wptopt errors."""

    @pytest.mark.parametrize(
        "build, field",
        [
            (lambda: ToneGrid(f0=-1.0), "f0"),
            (lambda: RicianParams(kappa=-1.0), "kappa"),
            (lambda: ChannelRealization(H=np.ones((2, 1)), L_h=2.0), None),
            (lambda: QpProblem(Q=[[1.0, 2.0], [0.0, 1.0]], f=[1.0, 1.0], A=[[1.0, 1.0]], b=[1.0]), None),
        ],
    )
    def test_translated_to_validation_error(self, build, field):
        with pytest.raises(ValidationError) as excinfo:
            build()
        assert excinfo.value.field_name == field
        assert isinstance(excinfo.value.cause, PydanticValidationError)
        assert excinfo.value.__cause__ is excinfo.value.cause

    def test_bad_problem_data_caught_as_base_error(self):
        with pytest.raises(WptOptError):
            build_qp([1.0, np.inf], DIODE, 1.0)

    def test_malformed_lp_is_lp_error(self):
        with pytest.raises(LpError, match="LpProblem"):
            LpProblem(c=[1.0, 1.0], A_ub=[[1.0, 1.0]], b_ub=[1.0, 2.0])
