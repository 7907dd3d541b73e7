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
Finite branch-and-bound over KKT complementarity.

Each node relaxes the KKT system to an LP whose value bounds every KKT
point in the subtree. A node whose LP solution satisfies every
complementarity pair is a KKT point and becomes an incumbent candidate,
valued with the true quadratic objective. Otherwise the most violated
pair (x_i, λ_i) or (μ_k, slack_k) is split into two children.
"""

import logging
import time
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np

from ...core.exceptions import SolverError, ValidationError
from ..lp import LpStatus
from ..qp import KktPoint, QpProblem, objective
from .bounds import variable_bounds
from .relaxation import Branch, Fixings, KktRelaxation
from .solution import Solution, SolverMethod, SolverOptions, SolverStats, make_solution

logger = logging.getLogger(__name__)

MAX_TONES = 32


@dataclass(frozen=True)
class Node:
    fixings: Fixings
    bound: float
    point: KktPoint
    depth: int


def _children(fix: Fixings, branch: Branch) -> List[Fixings]:
    if branch.kind == "x":
        return [
            replace(fix, zero_x=fix.zero_x | {branch.index}),
            replace(fix, zero_lam=fix.zero_lam | {branch.index}),
        ]
    return [
        replace(fix, zero_mu=fix.zero_mu | {branch.index}),
        replace(fix, tight_rows=fix.tight_rows | {branch.index}),
    ]


def solve_bb(p: QpProblem, opts: Optional[SolverOptions] = None) -> Solution:
    """
    Globally solve an LCQP by complementarity branch-and-bound.

    The search is depth-first; among the two children of a node the one
    with the larger relaxation value is explored first.

    Args:
        p: Problem to solve.
        opts: Node limit and tolerances.

    Returns:
        Certified optimum with multipliers and solver statistics.

    Raises:
        ValidationError: For more than 32 tones.
        SolverError: When the node limit is exceeded; the best incumbent and
            remaining gap are attached.
    """
    options = opts or SolverOptions()
    if p.n_tones > MAX_TONES:
        raise ValidationError(f"branch-and-bound handles at most {MAX_TONES} tones", "n_tones", p.n_tones)
    started = time.perf_counter()
    scaled, scaling = p.normalized()
    relaxation = KktRelaxation(scaled, variable_bounds(scaled))

    root_fix = Fixings()
    root = relaxation.solve(root_fix)
    if root.status is not LpStatus.OPTIMAL:
        raise SolverError(f"root relaxation is {root.status.value}")
    assert root.objective is not None
    stack: List[Node] = [Node(root_fix, root.objective, relaxation.point(root), 0)]

    incumbent: Optional[KktPoint] = None
    incumbent_value = -np.inf
    nodes = 0
    max_increase = 0.0
    while stack:
        node = stack.pop()
        if node.bound <= incumbent_value + options.tolerance:
            continue
        nodes += 1
        if nodes > options.node_limit:
            open_bound = max([node.bound] + [n.bound for n in stack])
            raise SolverError(
                f"node limit {options.node_limit} exceeded",
                incumbent=None if incumbent is None else scaling.restore(incumbent),
                gap=(open_bound - incumbent_value) * scaling.objective_scale,
            )

        branch = relaxation.most_violated(node.point, node.fixings)
        if branch is None or branch.violation <= options.complementarity_tolerance:
            value = objective(scaled, node.point.x)
            if value > incumbent_value:
                incumbent, incumbent_value = node.point, value
                logger.debug("incumbent %.12g at depth %d", value, node.depth)
            continue

        children: List[Node] = []
        for fix in _children(node.fixings, branch):
            result = relaxation.solve(fix)
            if result.status is not LpStatus.OPTIMAL:
                continue
            assert result.objective is not None
            max_increase = max(max_increase, result.objective - node.bound)
            children.append(Node(fix, result.objective, relaxation.point(result), node.depth + 1))
        children.sort(key=lambda child: child.bound)
        stack.extend(children)

    if incumbent is None:
        raise SolverError("branch-and-bound found no KKT point")

    polished = relaxation.polish(incumbent)
    stats = SolverStats(
        nodes_explored=nodes,
        lps_solved=relaxation.lps_solved,
        wall_time=time.perf_counter() - started,
        max_bound_increase=max_increase,
    )
    logger.debug("branch-and-bound explored %d nodes, %d LPs", nodes, relaxation.lps_solved)
    return make_solution(p, scaling.restore(polished), stats, SolverMethod.BRANCH_AND_BOUND.value)
