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

"""Closed-form bounds on primal and dual variables at KKT points."""

import numpy as np
from pydantic import ConfigDict

from ...core.model import DomainModel
from ..qp import QpProblem


class VariableBounds(DomainModel):
    """
    Upper bounds valid at every KKT point of a problem.

    u bounds x, v bounds λ and mu_max bounds μ.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    u: np.ndarray
    v: np.ndarray
    mu_max: np.ndarray


def variable_bounds(p: QpProblem) -> VariableBounds:
    """
    Analytic KKT bounds.

    u_i is the tightest row limit b_k/A_ki. At a KKT point with μ_k > 0
    some tone i with A_ki > 0 carries power, so stationarity gives
    μ_k·A_ki ≤ (Qx + f)_i ≤ (Qu + f)_i. λ = Aᵀμ − Qx − f is then at most Aᵀμ_max.
    """
    positive = p.A > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        limits = np.where(positive, p.b[:, np.newaxis] / p.A, np.inf)
    u = limits.min(axis=0)

    gradient = p.Q @ u + p.f
    mu_max = np.zeros(p.n_rows)
    for k in range(p.n_rows):
        mask = positive[k]
        if np.any(mask):
            mu_max[k] = float(np.max(gradient[mask] / p.A[k, mask]))
    v = p.A.T @ mu_max
    return VariableBounds(u=u, v=v, mu_max=mu_max)
