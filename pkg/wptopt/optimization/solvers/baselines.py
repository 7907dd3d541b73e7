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

"""Heuristic amplitude allocations used as baselines."""

from enum import Enum
from typing import Optional

import numpy as np
import numpy.typing as npt
from pydantic import ConfigDict

from ...core.exceptions import ValidationError
from ...core.model import DomainModel
from ...core.waveform import ToneAmplitudes
from ..qp import QpProblem, objective

FEASIBILITY_SLACK = 1e-9


class BaselineKind(str, Enum):
    EQUAL = "equal"
    """Equal amplitude on every tone."""

    MRT = "mrt"
    """Amplitudes proportional to the channel gains."""

    SINGLE = "single"
    """All power on the strongest tone."""


class AllocationEvaluation(DomainModel):
    """Objective of a given allocation and whether it respects every row."""

    model_config = ConfigDict(frozen=True)

    objective: float
    feasible: bool
    violated_row: Optional[int] = None


def baseline_alloc(kind: BaselineKind, h_eff: npt.ArrayLike, P: float) -> ToneAmplitudes:
    """
    Amplitudes of a baseline strategy spending the whole budget, ½‖s‖² = P.

    Raises:
        ValidationError: On non-positive gains or budget.
    """
    h = np.asarray(h_eff, dtype=float).ravel()
    if h.size == 0 or np.any(h <= 0):
        raise ValidationError("channel gains must be positive", "h_eff")
    if P <= 0:
        raise ValidationError("power budget must be positive", "P", P)
    kind = BaselineKind(kind)
    if kind is BaselineKind.EQUAL:
        return np.full(h.size, np.sqrt(2.0 * P / h.size))
    if kind is BaselineKind.MRT:
        return h * np.sqrt(2.0 * P / float(np.sum(h**2)))
    s = np.zeros(h.size)
    s[int(np.argmax(h))] = np.sqrt(2.0 * P)
    return s


def evaluate_allocation(s: npt.ArrayLike, p: QpProblem) -> AllocationEvaluation:
    """Objective of x = s² with a flag for the first violated constraint row."""
    x = np.asarray(s, dtype=float) ** 2
    if x.shape != (p.n_tones,):
        raise ValidationError("allocation length differs from the tone count", "s", x.shape)
    load = p.A @ x
    violated = np.flatnonzero(load > p.b * (1.0 + FEASIBILITY_SLACK))
    return AllocationEvaluation(
        objective=objective(p, x),
        feasible=violated.size == 0,
        violated_row=int(violated[0]) if violated.size else None,
    )
