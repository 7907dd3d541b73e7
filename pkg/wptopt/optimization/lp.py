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
Dense bounded-variable primal simplex.

Problems have the form

    maximize cᵀx  subject to  A_eq x = b_eq,  A_ub x ≤ b_ub,  lower ≤ x ≤ upper

with finite lower bounds. Upper bounds are handled by complementing a
variable (y ↦ width − y) instead of adding rows, so every nonbasic
variable sits at zero in the current representation. Phase one uses one
artificial per row. Pricing is Dantzig's rule until a run of degenerate
pivots, then Bland's rule for the rest of the solve.
"""

import logging
from enum import Enum
from typing import Any, ClassVar, List, Optional, Tuple, Type

import numpy as np
import numpy.typing as npt
from pydantic import ConfigDict, model_validator

from ..core.exceptions import LpError, WptOptError
from ..core.model import DomainModel

logger = logging.getLogger(__name__)

FEASIBILITY_TOLERANCE = 1e-9
PIVOT_TOLERANCE = 1e-10
MAX_VARIABLES = 200


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LpProblem(DomainModel):
    """
    Linear program in maximization form.

    Omitted row blocks default to empty, lower bounds to zero and upper
    bounds to +inf.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
    invalid_error: ClassVar[Type[WptOptError]] = LpError

    c: np.ndarray
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None

    @model_validator(mode="before")
    @classmethod
    def _coerce(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        c = np.array(data["c"], dtype=float).ravel()
        n = c.size
        data["c"] = c
        for matrix, vector in (("A_eq", "b_eq"), ("A_ub", "b_ub")):
            if data.get(matrix) is None:
                data[matrix] = np.zeros((0, n))
                data[vector] = np.zeros(0)
            else:
                data[matrix] = np.array(data[matrix], dtype=float).reshape(-1, n) if n else np.zeros((0, 0))
                data[vector] = np.array(data[vector], dtype=float).ravel()
        data["lower"] = (
            np.zeros(n) if data.get("lower") is None else np.array(data["lower"], dtype=float).ravel()
        )
        data["upper"] = (
            np.full(n, np.inf) if data.get("upper") is None else np.array(data["upper"], dtype=float).ravel()
        )
        for value in data.values():
            if isinstance(value, np.ndarray):
                value.setflags(write=False)
        return data

    @model_validator(mode="after")
    def _check(self) -> "LpProblem":
        n = self.n_variables
        for matrix, vector in ((self.A_eq, self.b_eq), (self.A_ub, self.b_ub)):
            assert matrix is not None and vector is not None
            if matrix.shape != (vector.size, n):
                raise ValueError(f"row block shape {matrix.shape} does not match {vector.size} x {n}")
            if not (np.all(np.isfinite(matrix)) and np.all(np.isfinite(vector))):
                raise ValueError("constraint coefficients must be finite")
        assert self.lower is not None and self.upper is not None
        if self.lower.size != n or self.upper.size != n:
            raise ValueError("bounds must have one entry per variable")
        if not np.all(np.isfinite(self.lower)):
            raise ValueError("lower bounds must be finite")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")
        if not np.all(np.isfinite(self.c)):
            raise ValueError("objective coefficients must be finite")
        return self

    @property
    def n_variables(self) -> int:
        return int(self.c.size)


class LpSolution(DomainModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    status: LpStatus
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    duals_eq: Optional[np.ndarray] = None
    duals_ub: Optional[np.ndarray] = None
    reduced_costs: Optional[np.ndarray] = None
    basis: Tuple[int, ...] = ()
    iterations: int = 0

    def dual_objective(self, p: LpProblem) -> float:
        """Lagrangian dual value bᵀπ + Σ r_j·x_j at the returned point."""
        if self.status is not LpStatus.OPTIMAL:
            raise LpError(f"no dual objective for status {self.status.value}")
        assert self.x is not None and self.duals_eq is not None
        assert self.duals_ub is not None and self.reduced_costs is not None
        assert p.b_eq is not None and p.b_ub is not None
        return float(p.b_eq @ self.duals_eq + p.b_ub @ self.duals_ub + self.reduced_costs @ self.x)


class SimplexSolver:
    """
    Tableau simplex over one LpProblem.

    Holds a mutable tableau; use one instance per thread.
    """

    def __init__(
        self,
        problem: LpProblem,
        feasibility_tolerance: float = FEASIBILITY_TOLERANCE,
        pivot_tolerance: float = PIVOT_TOLERANCE,
        max_iterations: Optional[int] = None,
    ) -> None:
        self.problem = problem
        self.feasibility_tolerance = feasibility_tolerance
        self.pivot_tolerance = pivot_tolerance
        assert problem.A_eq is not None and problem.A_ub is not None
        assert problem.b_eq is not None and problem.b_ub is not None
        assert problem.lower is not None and problem.upper is not None

        n = problem.n_variables
        m_eq, m_ub = problem.b_eq.size, problem.b_ub.size
        self.n_structural = n + m_ub
        self.m_eq = m_eq
        rows = np.zeros((m_eq + m_ub, self.n_structural))
        rows[:m_eq, :n] = problem.A_eq
        rows[m_eq:, :n] = problem.A_ub
        rows[m_eq:, n:] = np.eye(m_ub)
        self.lower = np.concatenate([problem.lower, np.zeros(m_ub)])
        upper = np.concatenate([problem.upper, np.full(m_ub, np.inf)])
        rhs = np.concatenate([problem.b_eq, problem.b_ub]) - rows @ self.lower

        self.row_sign = np.where(rhs < 0, -1.0, 1.0)
        self.rows = rows * self.row_sign[:, np.newaxis]
        rhs = rhs * self.row_sign
        m = rows.shape[0]
        self.width = np.concatenate([upper - self.lower, np.full(m, np.inf)])
        self.tableau = np.hstack([self.rows, np.eye(m), rhs[:, np.newaxis]])
        self.basis: List[int] = list(range(self.n_structural, self.n_structural + m))
        self.flipped = np.zeros(self.n_structural + m, dtype=bool)
        self.kept_rows = np.arange(m)
        self.iterations = 0
        self.max_iterations = max_iterations or 50 * (m + self.n_structural + 1)

    @property
    def n_columns(self) -> int:
        return self.tableau.shape[1] - 1

    def _complement(self, k: int) -> None:
        column = self.tableau[:, k].copy()
        self.tableau[:, -1] -= column * self.width[k]
        self.tableau[:, k] = -column
        self.flipped[k] = not self.flipped[k]
        if k in self.basis:
            self.tableau[self.basis.index(k), :] *= -1.0

    def _pivot(self, r: int, j: int) -> None:
        pivot_row = self.tableau[r, :] / self.tableau[r, j]
        self.tableau -= np.outer(self.tableau[:, j], pivot_row)
        self.tableau[r, :] = pivot_row
        self.basis[r] = j

    def _reduced_costs(self, cost: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        current = np.where(self.flipped[: self.n_columns], -cost, cost)
        return current - current[self.basis] @ self.tableau[:, :-1]

    def _ratio_test(self, j: int) -> Tuple[float, Optional[int], bool]:
        """Step length, leaving row (None for a bound flip) and whether it leaves at its upper bound."""
        column = self.tableau[:, j]
        values = np.maximum(self.tableau[:, -1], 0.0)
        best_step = self.width[j]
        best_row: Optional[int] = None
        to_upper = False
        for r in range(len(self.basis)):
            alpha = column[r]
            if alpha > self.pivot_tolerance:
                step, upper = values[r] / alpha, False
            elif alpha < -self.pivot_tolerance and np.isfinite(self.width[self.basis[r]]):
                step, upper = max(self.width[self.basis[r]] - values[r], 0.0) / -alpha, True
            else:
                continue
            if step < best_step or (
                best_row is not None and step == best_step and self.basis[r] < self.basis[best_row]
            ):
                best_step, best_row, to_upper = step, r, upper
        return best_step, best_row, to_upper

    def _iterate(self, cost: npt.NDArray[np.float64]) -> LpStatus:
        bland = False
        degenerate_run = 0
        threshold = 3 * self.n_columns
        while True:
            if self.iterations >= self.max_iterations:
                raise LpError(
                    "simplex iteration limit reached",
                    details={"iterations": self.iterations},
                )
            d = self._reduced_costs(cost)
            eligible = d > self.feasibility_tolerance
            eligible[self.basis] = False
            eligible &= self.width[: self.n_columns] > self.feasibility_tolerance
            candidates = np.flatnonzero(eligible)
            if candidates.size == 0:
                return LpStatus.OPTIMAL
            j = int(candidates[0]) if bland else int(candidates[np.argmax(d[candidates])])

            step, row, to_upper = self._ratio_test(j)
            if not np.isfinite(step):
                return LpStatus.UNBOUNDED
            self.iterations += 1
            if row is None:
                self._complement(j)
            else:
                if to_upper:
                    self._complement(self.basis[row])
                self._pivot(row, j)

            if step <= self.feasibility_tolerance:
                degenerate_run += 1
                if not bland and degenerate_run >= threshold:
                    logger.debug("switching to Bland's rule after %d degenerate pivots", degenerate_run)
                    bland = True
            else:
                degenerate_run = 0

    def _drop_artificials(self) -> None:
        n_art_start = self.n_structural
        redundant: List[int] = []
        for r in range(len(self.basis)):
            if self.basis[r] < n_art_start:
                continue
            row = self.tableau[r, :n_art_start]
            movable = np.flatnonzero(
                (np.abs(row) > self.pivot_tolerance)
                & ~np.isin(np.arange(n_art_start), self.basis)
            )
            if movable.size:
                self._pivot(r, int(movable[np.argmax(np.abs(row[movable]))]))
            else:
                redundant.append(r)
        keep = [r for r in range(len(self.basis)) if r not in redundant]
        if redundant:
            logger.debug("dropping %d redundant rows", len(redundant))
        columns = list(range(n_art_start)) + [self.tableau.shape[1] - 1]
        self.tableau = self.tableau[np.ix_(keep, columns)]
        self.basis = [self.basis[r] for r in keep]
        self.kept_rows = self.kept_rows[keep]
        self.flipped = self.flipped[:n_art_start]
        self.width = self.width[:n_art_start]

    def solve(self) -> LpSolution:
        p = self.problem
        m = len(self.basis)
        phase_one = np.concatenate([np.zeros(self.n_structural), -np.ones(m)])
        self._iterate(phase_one)
        infeasibility = float(np.sum(self.tableau[:, -1][np.array(self.basis) >= self.n_structural]))
        rhs_scale = 1.0 + float(np.max(np.abs(self.tableau[:, -1]), initial=0.0))
        if infeasibility > self.feasibility_tolerance * rhs_scale:
            return LpSolution(status=LpStatus.INFEASIBLE, iterations=self.iterations)
        self._drop_artificials()

        cost = np.concatenate([p.c, np.zeros(self.n_structural - p.n_variables)])
        if self._iterate(cost) is LpStatus.UNBOUNDED:
            return LpSolution(status=LpStatus.UNBOUNDED, iterations=self.iterations)
        return self._extract(cost)

    def _extract(self, cost: npt.NDArray[np.float64]) -> LpSolution:
        p = self.problem
        n = p.n_variables
        values = np.zeros(self.n_structural)
        values[self.basis] = np.maximum(self.tableau[:, -1], 0.0)
        shifted = np.where(self.flipped, self.width - values, values)
        x = (self.lower + shifted)[:n]

        basis_matrix = self.rows[np.ix_(self.kept_rows, self.basis)]
        multipliers = np.zeros(len(self.row_sign))
        if self.basis:
            multipliers[self.kept_rows] = np.linalg.solve(basis_matrix.T, cost[self.basis])
        multipliers *= self.row_sign
        duals_eq = multipliers[: self.m_eq]
        duals_ub = multipliers[self.m_eq:]
        assert p.A_eq is not None and p.A_ub is not None
        reduced = p.c - p.A_eq.T @ duals_eq - p.A_ub.T @ duals_ub
        return LpSolution(
            status=LpStatus.OPTIMAL,
            x=x,
            objective=float(p.c @ x),
            duals_eq=duals_eq,
            duals_ub=duals_ub,
            reduced_costs=reduced,
            basis=tuple(self.basis),
            iterations=self.iterations,
        )


def solve_lp(
    p: LpProblem,
    feasibility_tolerance: float = FEASIBILITY_TOLERANCE,
    pivot_tolerance: float = PIVOT_TOLERANCE,
    max_iterations: Optional[int] = None,
) -> LpSolution:
    """
    Solve a linear program, reporting infeasibility and unboundedness by status.

    Raises:
        LpError: For more than 200 variables or when the iteration limit is hit.
    """
    if p.n_variables > MAX_VARIABLES:
        raise LpError(
            f"problem has {p.n_variables} variables, at most {MAX_VARIABLES} supported",
            details={"n_variables": p.n_variables},
        )
    solver = SimplexSolver(p, feasibility_tolerance, pivot_tolerance, max_iterations)
    solution = solver.solve()
    logger.debug("lp %s after %d iterations", solution.status.value, solution.iterations)
    return solution


def make_lp(**kwargs: Any) -> LpProblem:
    """Build an LpProblem from keyword arrays; malformed data raises LpError."""
    return LpProblem(**kwargs)
