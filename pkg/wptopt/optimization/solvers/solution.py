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

"""Result and option records shared by the global solvers."""

from enum import Enum
from typing import Literal

import numpy as np
from pydantic import ConfigDict, Field

from ...core.model import DomainModel
from ..qp import KktPoint, QpProblem, kkt_residual, objective


class SolverMethod(str, Enum):
    """Tag of the method that produced a Solution."""

    BRANCH_AND_BOUND = "bb"
    MILP = "milp"
    ORACLE = "oracle"


class SolverStats(DomainModel):
    model_config = ConfigDict(frozen=True)

    nodes_explored: int = 0
    lps_solved: int = 0
    wall_time: float = 0.0
    """Seconds spent in the solve; excluded from any persisted output."""

    max_bound_increase: float = 0.0
    """Largest amount by which a child relaxation exceeded its parent, on the normalized objective."""


class SolverOptions(DomainModel):
    model_config = ConfigDict(frozen=True)

    node_limit: int = Field(default=100_000, gt=0)
    tolerance: float = Field(default=1e-10, gt=0)
    """Absolute objective tolerance for fathoming, on the normalized problem."""

    complementarity_tolerance: float = Field(default=1e-9, gt=0)
    bound_strategy: Literal["analytic"] = "analytic"


class Solution(DomainModel):
    """
    Globally optimal allocation with its KKT certificate.

    ``objective`` is the quadratic objective evaluated at ``x`` and
    ``s`` holds the amplitudes √x.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x: np.ndarray
    s: np.ndarray
    mu: np.ndarray
    lam: np.ndarray
    objective: float
    kkt_residual: float
    stats: SolverStats
    method: SolverMethod

    @property
    def support(self) -> tuple:
        """Indices of tones carrying power."""
        return tuple(int(i) for i in np.flatnonzero(self.x > 0))


def make_solution(p: QpProblem, pt: KktPoint, stats: SolverStats, method: str) -> Solution:
    """Clip round-off negatives and attach objective and residual on the original problem."""
    x = np.maximum(pt.x, 0.0)
    x[x <= 1e-14 * max(1.0, float(np.max(x)))] = 0.0
    lam = np.maximum(pt.lam, 0.0)
    mu = np.maximum(pt.mu, 0.0)
    clean = KktPoint(x=x, mu=mu, lam=lam)
    return Solution(
        x=x,
        s=np.sqrt(x),
        mu=mu,
        lam=lam,
        objective=objective(p, x),
        kkt_residual=kkt_residual(p, clean),
        stats=stats,
        method=SolverMethod(method),
    )
