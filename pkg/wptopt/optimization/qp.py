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
Linearly constrained quadratic program for amplitude allocation.

The problem is

    maximize ½xᵀQx + fᵀx  subject to  Ax ≤ b, x ≥ 0

with x_i = s_i² the power on tone i. Q is entrywise non-negative and
indefinite, so the problem is non-convex. KKT points use the
maximization sign convention

    Qx + f − Aᵀμ + λ = 0,  μ ≥ 0,  λ ≥ 0,  x·λ = 0,  μ·(Ax − b) = 0

under which the objective at any KKT point equals ½(fᵀx + bᵀμ).
"""

import itertools
import logging
import time
from typing import TYPE_CHECKING, Any, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
import scipy.linalg
from pydantic import ConfigDict, model_validator

from ..core.exceptions import DegenerateChannelError, SolverError, ValidationError
from ..core.harvester import ObjectiveCoeffs
from ..core.model import DomainModel
from ..core.waveform import analytic_moments

if TYPE_CHECKING:
    from .solvers.solution import Solution

logger = logging.getLogger(__name__)

KKT_TOLERANCE = 1e-8
CONDITION_LIMIT = 1e12
TIE_TOLERANCE = 1e-10
ORACLE_MAX_TONES = 16


def _readonly(values: Any, ndim: int) -> np.ndarray:
    array = np.array(values, dtype=float)
    if ndim == 2 and array.ndim == 1:
        array = array[np.newaxis, :]
    array.setflags(write=False)
    return array


class Provenance(DomainModel):
    """Channel, model and budgets a problem was assembled from."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    h_eff: np.ndarray
    g_eff: Optional[np.ndarray] = None
    coeffs: ObjectiveCoeffs
    power_budget: float
    """Transmit power P in W."""

    p_sat: Optional[float] = None
    """Saturation power at the information receiver in W."""


class QpProblem(DomainModel):
    """
    LCQP data with one budget row and an optional saturation row.

    Arrays are stored read-only so problems can be shared across threads.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    Q: np.ndarray
    f: np.ndarray
    A: np.ndarray
    b: np.ndarray
    provenance: Optional[Provenance] = None

    @model_validator(mode="before")
    @classmethod
    def _coerce(cls, data: Any) -> Any:
        if isinstance(data, dict):
            data = dict(data)
            for key, ndim in (("Q", 2), ("f", 1), ("A", 2), ("b", 1)):
                if key in data:
                    data[key] = _readonly(data[key], ndim)
        return data

    @model_validator(mode="after")
    def _check_shapes(self) -> "QpProblem":
        n = self.f.shape[0] if self.f.ndim == 1 else -1
        if n < 1:
            raise ValueError("f must be a non-empty vector")
        if self.Q.shape != (n, n):
            raise ValueError(f"Q must be {n}x{n}, got {self.Q.shape}")
        if self.A.ndim != 2 or self.A.shape[1] != n or self.A.shape[0] not in (1, 2):
            raise ValueError(f"A must have one or two rows of length {n}, got {self.A.shape}")
        if self.b.shape != (self.A.shape[0],):
            raise ValueError(f"b must have {self.A.shape[0]} entries, got {self.b.shape}")
        if np.any(self.b <= 0):
            raise ValueError("right-hand sides must be positive")
        if np.any(self.A < 0):
            raise ValueError("constraint rows must be non-negative")
        if not np.all(np.any(self.A > 0, axis=0)):
            raise ValueError("every tone must be limited by some constraint row")
        if not all(np.all(np.isfinite(m)) for m in (self.Q, self.f, self.A, self.b)):
            raise ValueError("problem data must be finite")
        if not np.array_equal(self.Q, self.Q.T):
            raise ValueError("Q must be symmetric")
        return self

    @property
    def n_tones(self) -> int:
        return int(self.f.shape[0])

    @property
    def n_rows(self) -> int:
        return int(self.A.shape[0])

    def normalized(self) -> Tuple["QpProblem", "Scaling"]:
        """
        Rescale to unit right-hand sides and an O(1) objective.

        With x = σ·x̃ and objective ω·(½x̃ᵀQ̃x̃ + f̃ᵀx̃) the scaled problem has
        Q̃ = σ²Q/ω, f̃ = σf/ω and rows σA_k/b_k ≤ 1, where σ is the largest
        per-coordinate upper bound and ω the best single-tone objective.
        """
        with np.errstate(divide="ignore"):
            ratios = np.where(self.A > 0, self.b[:, np.newaxis] / self.A, np.inf)
        coordinate_bounds = ratios.min(axis=0)
        sigma = float(np.max(coordinate_bounds[np.isfinite(coordinate_bounds)]))
        single_tone = 0.5 * sigma**2 * np.diag(self.Q) + sigma * self.f
        omega = float(np.max(single_tone))
        scaled = QpProblem(
            Q=(sigma**2 / omega) * self.Q,
            f=(sigma / omega) * self.f,
            A=sigma * self.A / self.b[:, np.newaxis],
            b=np.ones(self.n_rows),
        )
        return scaled, Scaling(x_scale=sigma, objective_scale=omega, row_scale=self.b)


class KktPoint(DomainModel):
    """Primal point with its multipliers."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x: np.ndarray
    mu: np.ndarray
    lam: np.ndarray


class Scaling(DomainModel):
    """Maps KKT points of a normalized problem back to the original one."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x_scale: float
    objective_scale: float
    row_scale: np.ndarray

    def restore(self, pt: KktPoint) -> KktPoint:
        return KktPoint(
            x=self.x_scale * pt.x,
            mu=self.objective_scale * pt.mu / self.row_scale,
            lam=self.objective_scale * pt.lam / self.x_scale,
        )


def build_qp(
    h_eff: npt.ArrayLike,
    coeffs: ObjectiveCoeffs,
    P: float,
    swipt: Optional[Tuple[npt.ArrayLike, float]] = None,
) -> QpProblem:
    """
    Assemble the allocation LCQP for a scalar channel.

    Args:
        h_eff: Effective channel gain per tone, all positive.
        coeffs: Objective coefficients from the harvester model.
        P: Transmit power budget in W; the budget row is Σx ≤ 2P.
        swipt: Optional (g_eff, P_sat) adding the row Σ g²x ≤ 2·P_sat.

    Raises:
        DegenerateChannelError: If any tone has zero gain.
        ValidationError: On non-positive budgets or negative receiver gains.
    """
    h = np.asarray(h_eff, dtype=float).ravel()
    if h.size == 0:
        raise ValidationError("at least one tone is required", "h_eff", h.size)
    if np.any(h <= 0):
        raise DegenerateChannelError(
            "tone with zero effective gain carries no power; drop it before building the problem",
            details={"zero_tones": np.flatnonzero(h <= 0).tolist()},
        )
    if P <= 0:
        raise ValidationError("power budget must be positive", "P", P)

    a = h**2
    weight = 2.0 - np.eye(h.size)
    Q = 0.75 * coeffs.c4 * weight * np.outer(a, a)
    f = 0.5 * coeffs.c2 * a
    rows = [np.ones(h.size)]
    rhs = [2.0 * P]
    g_eff: Optional[npt.NDArray[np.float64]] = None
    p_sat: Optional[float] = None
    if swipt is not None:
        g_eff = np.asarray(swipt[0], dtype=float).ravel()
        p_sat = float(swipt[1])
        if g_eff.shape != h.shape:
            raise ValidationError("receiver gains must match the tone count", "g_eff", g_eff.shape)
        if np.any(g_eff < 0):
            raise ValidationError("receiver gains must be non-negative", "g_eff")
        if p_sat <= 0:
            raise ValidationError("saturation power must be positive", "P_sat", p_sat)
        rows.append(g_eff**2)
        rhs.append(2.0 * p_sat)

    provenance = Provenance(
        h_eff=_readonly(h, 1),
        g_eff=None if g_eff is None else _readonly(g_eff, 1),
        coeffs=coeffs,
        power_budget=float(P),
        p_sat=p_sat,
    )
    return QpProblem(Q=Q, f=f, A=np.vstack(rows), b=np.array(rhs), provenance=provenance)


def objective(p: QpProblem, x: npt.ArrayLike) -> float:
    """Quadratic objective ½xᵀQx + fᵀx, offset excluded."""
    v = np.asarray(x, dtype=float)
    return float(0.5 * v @ p.Q @ v + p.f @ v)


def linearized_objective(p: QpProblem, pt: KktPoint) -> float:
    """Value ½(fᵀx + bᵀμ), equal to the objective at every KKT point."""
    return float(0.5 * (p.f @ pt.x + p.b @ pt.mu))


def fdc_from_amplitudes(s: npt.ArrayLike, h_eff: npt.ArrayLike, coeffs: ObjectiveCoeffs) -> float:
    """Harvester objective c4·E{y⁴} + c2·E{y²} from tone amplitudes."""
    m2, m4 = analytic_moments(s, h_eff)
    return coeffs.c4 * m4 + coeffs.c2 * m2


def kkt_residual(p: QpProblem, pt: KktPoint) -> float:
    """Largest violation among stationarity, complementarity and feasibility."""
    x, mu, lam = pt.x, pt.mu, pt.lam
    slack = p.A @ x - p.b
    stationarity = p.Q @ x + p.f - p.A.T @ mu + lam
    components = [
        float(np.max(np.abs(stationarity))),
        float(np.max(np.abs(x * lam))),
        float(np.max(np.abs(mu * slack))),
        max(0.0, -float(np.min(x))),
        max(0.0, -float(np.min(lam))),
        max(0.0, -float(np.min(mu))),
        max(0.0, float(np.max(slack))),
    ]
    return max(components)


def solve_active_set(
    p: QpProblem, support: Sequence[int], rows: Sequence[int]
) -> Optional[KktPoint]:
    """
    Solve the KKT system with the active set fixed.

    Off-support x and on-support λ are zero, inactive rows have μ = 0 and
    active rows hold with equality. λ off the support follows from
    stationarity. Returns None when the reduced system is singular or its
    condition number exceeds the limit. Signs are not checked here.
    """
    s_idx = np.asarray(support, dtype=int)
    r_idx = np.asarray(rows, dtype=int)
    n_s, n_r = len(s_idx), len(r_idx)
    if n_s == 0:
        return None
    A_rs = p.A[np.ix_(r_idx, s_idx)]
    system = np.zeros((n_s + n_r, n_s + n_r))
    system[:n_s, :n_s] = p.Q[np.ix_(s_idx, s_idx)]
    system[:n_s, n_s:] = -A_rs.T
    system[n_s:, :n_s] = A_rs
    rhs = np.concatenate([-p.f[s_idx], p.b[r_idx]])

    if np.linalg.cond(system) > CONDITION_LIMIT:
        logger.debug("skipping ill-conditioned active set support=%s rows=%s", support, rows)
        return None
    solution = scipy.linalg.lu_solve(scipy.linalg.lu_factor(system), rhs)

    x = np.zeros(p.n_tones)
    x[s_idx] = solution[:n_s]
    mu = np.zeros(p.n_rows)
    mu[r_idx] = solution[n_s:]
    lam = p.A.T @ mu - p.Q @ x - p.f
    lam[s_idx] = 0.0
    return KktPoint(x=x, mu=mu, lam=lam)


def polytope_vertices(p: QpProblem) -> List[npt.NDArray[np.float64]]:
    """Vertices of {x ≥ 0, Ax ≤ b}; at most one nonzero per constraint row."""
    n = p.n_tones
    candidates: List[npt.NDArray[np.float64]] = [np.zeros(n)]
    for i in range(n):
        for k in range(p.n_rows):
            if p.A[k, i] > 0:
                x = np.zeros(n)
                x[i] = p.b[k] / p.A[k, i]
                candidates.append(x)
    if p.n_rows == 2:
        for i, j in itertools.combinations(range(n), 2):
            block = p.A[:, [i, j]]
            if abs(np.linalg.det(block)) <= 1e-14 * max(1.0, float(np.max(np.abs(block))) ** 2):
                continue
            pair = np.linalg.solve(block, p.b)
            if np.all(pair >= 0):
                x = np.zeros(n)
                x[[i, j]] = pair
                candidates.append(x)
    limit = p.b * (1.0 + 1e-12)
    return [x for x in candidates if np.all(p.A @ x <= limit)]


def enumerate_kkt_oracle(p: QpProblem) -> "Solution":
    """
    Certify the global optimum by enumerating every active set.

    For each support of x and each pattern of active rows the KKT system
    is solved on the normalized problem; points with residual at most 1e-8
    are kept and the best objective wins, ties going to the
    lexicographically smallest support. Polytope vertices are evaluated as
    a cross-check.

    Raises:
        ValidationError: For more than 16 tones.
        SolverError: If no KKT point is found or a vertex beats every KKT point.
    """
    from .solvers.solution import SolverStats, make_solution

    if p.n_tones > ORACLE_MAX_TONES:
        raise ValidationError(
            f"oracle enumerates at most {ORACLE_MAX_TONES} tones", "n_tones", p.n_tones
        )
    started = time.perf_counter()
    scaled, scaling = p.normalized()

    best: Optional[KktPoint] = None
    best_value = -np.inf
    best_support: Tuple[int, ...] = ()
    systems = 0
    row_patterns = [
        rows for size in range(scaled.n_rows + 1)
        for rows in itertools.combinations(range(scaled.n_rows), size)
    ]
    for size in range(1, scaled.n_tones + 1):
        for support in itertools.combinations(range(scaled.n_tones), size):
            for rows in row_patterns:
                systems += 1
                pt = solve_active_set(scaled, support, rows)
                if pt is None or kkt_residual(scaled, pt) > KKT_TOLERANCE:
                    continue
                value = objective(scaled, pt.x)
                if value > best_value + TIE_TOLERANCE or (
                    abs(value - best_value) <= TIE_TOLERANCE and support < best_support
                ):
                    best, best_value, best_support = pt, value, support

    if best is None:
        raise SolverError("no feasible KKT point found", details={"systems": systems})

    vertex_best = max(objective(scaled, x) for x in polytope_vertices(scaled))
    if vertex_best > best_value + 1e-9 * max(1.0, abs(best_value)):
        raise SolverError(
            "a polytope vertex beats every enumerated KKT point",
            incumbent=best,
            gap=vertex_best - best_value,
        )

    logger.debug("oracle solved %d active-set systems, best support %s", systems, best_support)
    stats = SolverStats(
        nodes_explored=systems, lps_solved=0, wall_time=time.perf_counter() - started
    )
    return make_solution(p, scaling.restore(best), stats, "oracle")
