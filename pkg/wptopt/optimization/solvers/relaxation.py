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
LP relaxation of the KKT system of a normalized LCQP.

Variables are laid out as [x (N), μ (K), λ (N)], optionally followed by
the complementarity binaries [z (N), ζ (K)] of the mixed-integer form.
The relaxation maximizes ½(fᵀx + bᵀμ) subject to stationarity, primal
feasibility and the analytic variable bounds.
"""

import logging
from dataclasses import dataclass, field
from typing import FrozenSet, Optional, Tuple

import numpy as np
import numpy.typing as npt

from ..lp import LpProblem, LpSolution, LpStatus, solve_lp
from ..qp import KKT_TOLERANCE, KktPoint, QpProblem, kkt_residual, objective, solve_active_set
from .bounds import VariableBounds

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Fixings:
    """Index sets pinned by branching."""

    zero_x: FrozenSet[int] = field(default_factory=frozenset)
    zero_lam: FrozenSet[int] = field(default_factory=frozenset)
    zero_mu: FrozenSet[int] = field(default_factory=frozenset)
    tight_rows: FrozenSet[int] = field(default_factory=frozenset)
    binaries: Tuple[Tuple[int, int], ...] = ()
    """(position, value) pairs for fixed binaries of the mixed-integer form."""


@dataclass(frozen=True)
class Branch:
    """Complementarity pair to split on: ("x", i) or ("row", k)."""

    kind: str
    index: int
    violation: float


class KktRelaxation:
    """Builds and solves node LPs for one normalized problem."""

    def __init__(self, problem: QpProblem, bounds: VariableBounds, with_binaries: bool = False) -> None:
        self.problem = problem
        self.bounds = bounds
        self.with_binaries = with_binaries
        self.n = problem.n_tones
        self.k = problem.n_rows
        self.lps_solved = 0

    @property
    def n_binaries(self) -> int:
        return self.n + self.k if self.with_binaries else 0

    def _layout(self) -> int:
        return 2 * self.n + self.k + self.n_binaries

    def build(self, fix: Fixings) -> LpProblem:
        p, n, k = self.problem, self.n, self.k
        width = self._layout()

        stationarity = np.zeros((n, width))
        stationarity[:, :n] = p.Q
        stationarity[:, n:n + k] = -p.A.T
        stationarity[:, n + k:2 * n + k] = np.eye(n)
        eq_rows = [stationarity]
        eq_rhs = [-p.f]
        ub_rows = []
        ub_rhs = []
        for row in range(k):
            line = np.zeros((1, width))
            line[0, :n] = p.A[row]
            if row in fix.tight_rows:
                eq_rows.append(line)
                eq_rhs.append(p.b[row:row + 1])
            else:
                ub_rows.append(line)
                ub_rhs.append(p.b[row:row + 1])

        upper = np.concatenate([self.bounds.u, self.bounds.mu_max, self.bounds.v])
        lower = np.zeros(width)
        if self.with_binaries:
            ub_rows.extend(self._binary_rows(width))
            ub_rhs.extend([np.zeros(n), self.bounds.v, np.zeros(k), np.zeros(k)])
            upper = np.concatenate([upper, np.ones(n + k)])
            for position, value in fix.binaries:
                lower[2 * n + k + position] = value
                upper[2 * n + k + position] = value
        upper[sorted(fix.zero_x)] = 0.0
        upper[[n + r for r in sorted(fix.zero_mu)]] = 0.0
        upper[[n + k + i for i in sorted(fix.zero_lam)]] = 0.0

        c = np.zeros(width)
        c[:n] = 0.5 * p.f
        c[n:n + k] = 0.5 * p.b
        return LpProblem(
            c=c,
            A_eq=np.vstack(eq_rows),
            b_eq=np.concatenate(eq_rhs),
            A_ub=np.vstack(ub_rows) if ub_rows else None,
            b_ub=np.concatenate(ub_rhs) if ub_rhs else None,
            lower=lower,
            upper=upper,
        )

    def _binary_rows(self, width: int) -> list:
        """Big-M rows x ≤ u·z, λ ≤ v·(1 − z), μ ≤ μ_max·ζ, b·ζ ≤ Ax."""
        p, n, k = self.problem, self.n, self.k
        z0, zeta0 = 2 * n + k, 3 * n + k
        x_rows = np.zeros((n, width))
        lam_rows = np.zeros((n, width))
        for i in range(n):
            x_rows[i, i] = 1.0
            x_rows[i, z0 + i] = -self.bounds.u[i]
            lam_rows[i, n + k + i] = 1.0
            lam_rows[i, z0 + i] = self.bounds.v[i]
        mu_rows = np.zeros((k, width))
        slack_rows = np.zeros((k, width))
        for r in range(k):
            mu_rows[r, n + r] = 1.0
            mu_rows[r, zeta0 + r] = -self.bounds.mu_max[r]
            slack_rows[r, :n] = -p.A[r]
            slack_rows[r, zeta0 + r] = p.b[r]
        return [x_rows, lam_rows, mu_rows, slack_rows]

    def solve(self, fix: Fixings) -> LpSolution:
        self.lps_solved += 1
        return solve_lp(self.build(fix))

    def point(self, solution: LpSolution) -> KktPoint:
        assert solution.status is LpStatus.OPTIMAL and solution.x is not None
        n, k = self.n, self.k
        values = solution.x
        return KktPoint(x=values[:n], mu=values[n:n + k], lam=values[n + k:2 * n + k])

    def binaries(self, solution: LpSolution) -> npt.NDArray[np.float64]:
        assert solution.x is not None
        return solution.x[2 * self.n + self.k:]

    def most_violated(self, pt: KktPoint, fix: Fixings) -> Optional[Branch]:
        """Largest complementarity product among unfixed pairs, or None if all are satisfied."""
        p = self.problem
        best: Optional[Branch] = None
        products = pt.x * pt.lam
        for i in range(self.n):
            if i in fix.zero_x or i in fix.zero_lam:
                continue
            if best is None or products[i] > best.violation:
                best = Branch("x", i, float(products[i]))
        slack = p.b - p.A @ pt.x
        for r in range(self.k):
            if r in fix.zero_mu or r in fix.tight_rows:
                continue
            violation = float(abs(pt.mu[r] * slack[r]))
            if best is None or violation > best.violation:
                best = Branch("row", r, violation)
        return best

    def polish(self, pt: KktPoint) -> KktPoint:
        """
        Replace an LP-accurate KKT point by the exact solution of its active set.

        The support is read off the complementarity pairs; the polished point
        is kept only if it is a KKT point at least as good as the original.
        """
        p = self.problem
        support = tuple(int(i) for i in np.flatnonzero(pt.x > pt.lam))
        slack = p.b - p.A @ pt.x
        rows = tuple(int(r) for r in np.flatnonzero(pt.mu > slack))
        polished = solve_active_set(p, support, rows)
        if polished is None or kkt_residual(p, polished) > KKT_TOLERANCE:
            logger.debug("polishing failed for support %s rows %s", support, rows)
            return pt
        if objective(p, polished.x) < objective(p, pt.x) - 1e-9:
            return pt
        return polished
