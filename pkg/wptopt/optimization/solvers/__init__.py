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

"""Global LCQP solvers and baseline allocations."""

from .baselines import AllocationEvaluation, BaselineKind, baseline_alloc, evaluate_allocation
from .bounds import VariableBounds, variable_bounds
from .branch_and_bound import solve_bb
from .milp import solve_milp_kkt
from .solution import Solution, SolverMethod, SolverOptions, SolverStats

__all__ = [
    "AllocationEvaluation",
    "BaselineKind",
    "Solution",
    "SolverMethod",
    "SolverOptions",
    "SolverStats",
    "VariableBounds",
    "baseline_alloc",
    "evaluate_allocation",
    "solve_bb",
    "solve_milp_kkt",
    "variable_bounds",
]
