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
Mixed-integer reformulation of the KKT system.

One binary z_i per tone selects x_i = 0 or λ_i = 0 through big-M rows,
and one binary ζ_k per constraint row selects μ_k = 0 or A_k x = b_k.
The resulting MILP is solved by implicit enumeration: binaries are fixed
depth-first, each partial assignment is bounded by its LP relaxation, and
an LP solution with integral binaries closes its subtree.
"""

import logging
import time
from dataclasses import replace
from typing import List, Optional, Tuple

import numpy as np

from ...core.exceptions import SolverError, ValidationError
from ..lp import LpStatus
from ..qp import KktPoint, QpProblem, objective
from .bounds import variable_bounds
from .relaxation import Fixings, KktRelaxation
from .solution import Solution, SolverMethod, SolverOptions, SolverStats, make_solution

logger = logging.getLogger(__name__)

MAX_TONES = 16
INTEGRALITY_TOLERANCE = 1e-9


def solve_milp_kkt(p: QpProblem, opts: Optional[SolverOptions] = None) -> Solution:
    """
    Globally solve an LCQP through its mixed-integer KKT reformulation.

    Tone binaries are fixed first, strongest linear coefficient first and
    "on" before "off"; row binaries follow with "tight" first.

    Raises:
        ValidationError: For more than 16 tones.
        SolverError: When the node limit is exceeded, with the incumbent and
            remaining gap attached, or when no KKT point exists.
    """
    options = opts or SolverOptions()
    if p.n_tones > MAX_TONES:
        raise ValidationError(f"implicit enumeration handles at most {MAX_TONES} tones", "n_tones", p.n_tones)
    started = time.perf_counter()
    scaled, scaling = p.normalized()
    relaxation = KktRelaxation(scaled, variable_bounds(scaled), with_binaries=True)
    n = scaled.n_tones
    order = [int(i) for i in np.argsort(-scaled.f, kind="stable")]
    order += [n + r for r in range(scaled.n_rows)]

    incumbent: Optional[KktPoint] = None
    incumbent_value = -np.inf
    nodes = 0
    # each open assignment carries the relaxation value of its parent
    stack: List[Tuple[Fixings, float]] = [(Fixings(), np.inf)]
    while stack:
        fix, parent_bound = stack.pop()
        nodes += 1
        if nodes > options.node_limit:
            open_bound = max([parent_bound] + [bound for _, bound in stack])
            raise SolverError(
                f"node limit {options.node_limit} exceeded",
                incumbent=None if incumbent is None else scaling.restore(incumbent),
                gap=max(open_bound - incumbent_value, 0.0) * scaling.objective_scale,
                details={"fixed": len(fix.binaries)},
            )
        result = relaxation.solve(fix)
        if result.status is not LpStatus.OPTIMAL:
            continue
        assert result.objective is not None
        if result.objective <= incumbent_value + options.tolerance:
            continue

        pt = relaxation.point(result)
        binaries = relaxation.binaries(result)
        fractional = np.minimum(binaries, 1.0 - binaries) > INTEGRALITY_TOLERANCE
        if not np.any(fractional) or len(fix.binaries) == len(order):
            value = objective(scaled, pt.x)
            if value > incumbent_value:
                incumbent, incumbent_value = pt, value
                logger.debug("incumbent %.12g after %d fixings", value, len(fix.binaries))
            continue

        position = order[len(fix.binaries)]
        for value in (0, 1):
            stack.append((replace(fix, binaries=fix.binaries + ((position, value),)), result.objective))

    if incumbent is None:
        raise SolverError("mixed-integer enumeration found no KKT point")

    polished = relaxation.polish(incumbent)
    stats = SolverStats(
        nodes_explored=nodes,
        lps_solved=relaxation.lps_solved,
        wall_time=time.perf_counter() - started,
    )
    logger.debug("implicit enumeration explored %d nodes", nodes)
    return make_solution(p, scaling.restore(polished), stats, SolverMethod.MILP.value)
