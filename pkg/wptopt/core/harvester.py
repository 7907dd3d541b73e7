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
Non-linear energy-harvester models.

Two models reduce to the quadratic-form objective c4·E{y⁴} + c2·E{y²}:
the truncated diode Taylor expansion and a second-order polynomial fit of
the rectifier's input/output curve. The sigmoid and rational models are
evaluators only.
"""

import math
from typing import Annotated, Literal, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
from pydantic import ConfigDict, Field
from scipy.special import expit

from .exceptions import ModelError, ValidationError
from .model import DomainModel


class DiodeParams(DomainModel):
    """Physical parameters of the rectifying diode and antenna."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    i_s: float = Field(default=5e-6, gt=0)
    """Reverse saturation current in A."""

    v_t: float = Field(default=25.86e-3, gt=0)
    """Thermal voltage in V."""

    gamma: float = Field(default=1.05, gt=0)
    """Ideality factor."""

    r_ant: float = Field(default=50.0, gt=0)
    """Antenna resistance in ohms."""


class DiodeTaylor(DomainModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["diode_taylor"] = "diode_taylor"
    k2: float = Field(gt=0)
    k4: float = Field(gt=0)
    r_ant: float = Field(gt=0)

    @classmethod
    def from_diode(cls, params: DiodeParams) -> "DiodeTaylor":
        k2, k4 = taylor_coeffs(params)
        return cls(k2=k2, k4=k4, r_ant=params.r_ant)


class Poly2(DomainModel):
    """
    Second-order polynomial P_out = β1·P_in² + β2·P_in + β3.

    Sign requirements for optimization are checked by ``model_coeffs``
    so that fits with a round-off negative β1 can still be evaluated.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["poly2"] = "poly2"
    beta1: float
    beta2: float
    beta3: float = 0.0


class Sigmoid(DomainModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["sigmoid"] = "sigmoid"
    pi1: float = Field(gt=0)
    pi2: float
    pi3: float = Field(gt=0)


class Rational(DomainModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["rational"] = "rational"
    eta1: float
    eta2: float
    eta3: float
    q0: float
    q1: float
    q2: float
    q3: float


class RationalSimplified(DomainModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["rational_simplified"] = "rational_simplified"
    theta1: float
    theta2: float
    theta3: float


HarvesterModel = Annotated[
    Union[DiodeTaylor, Poly2, Sigmoid, Rational, RationalSimplified],
    Field(discriminator="kind"),
]


class ObjectiveCoeffs(DomainModel):
    """Coefficients of the shared objective c4·E{y⁴} + c2·E{y²} + offset."""

    model_config = ConfigDict(frozen=True)

    c2: float = Field(gt=0)
    c4: float = Field(ge=0)
    offset: float = 0.0


def taylor_coeffs(p: DiodeParams) -> Tuple[float, float]:
    """Diode Taylor coefficients k_n = i_s / (n!·(γ·v_t)^n) for n = 2, 4."""
    scale = p.gamma * p.v_t
    k2 = p.i_s / (math.factorial(2) * scale**2)
    k4 = p.i_s / (math.factorial(4) * scale**4)
    return k2, k4


def model_coeffs(m: HarvesterModel) -> ObjectiveCoeffs:
    """
    Reduce a harvester model to quadratic-form objective coefficients.

    Raises:
        ModelError: For evaluator-only models, or a Poly2 fit that is not
            convex and increasing at the origin.
    """
    if isinstance(m, DiodeTaylor):
        return ObjectiveCoeffs(c2=m.k2 * m.r_ant, c4=m.k4 * m.r_ant**2)
    if isinstance(m, Poly2):
        if m.beta1 < 0 or m.beta2 <= 0:
            raise ModelError(
                "second-order fit must have beta1 >= 0 and beta2 > 0 to be optimized",
                details={"beta1": m.beta1, "beta2": m.beta2},
            )
        return ObjectiveCoeffs(c2=m.beta2, c4=m.beta1, offset=m.beta3)
    raise ModelError(f"model not reducible to LCQP: {m.kind}", details={"kind": m.kind})


def report_output(coeffs: ObjectiveCoeffs, value: float) -> float:
    """Reported harvester output: objective value plus offset, clamped at zero."""
    return max(value + coeffs.offset, 0.0)


def fit_poly2(p_in: npt.ArrayLike, p_out: npt.ArrayLike) -> Poly2:
    """
    Least-squares second-order fit of a rectifier's output power curve.

    Input powers are scaled by their maximum before forming the normal
    equations of the design matrix [P_in², P_in, 1]; coefficients are
    unscaled on return.

    Raises:
        ModelError: With fewer than three distinct input powers.
        ValidationError: On mismatched or non-finite samples.
    """
    x = np.asarray(p_in, dtype=float).ravel()
    y = np.asarray(p_out, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValidationError("input and output sample counts differ", "p_out", y.shape)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValidationError("samples must be finite", "samples")
    if len(np.unique(x)) < 3:
        raise ModelError(
            "rank-deficient fit: at least three distinct input powers are required",
            details={"distinct": int(len(np.unique(x)))},
        )

    scale = float(np.max(np.abs(x)))
    xs = x / scale
    design = np.column_stack([xs**2, xs, np.ones_like(xs)])
    gram = design.T @ design
    try:
        beta = np.linalg.solve(gram, design.T @ y)
    except np.linalg.LinAlgError as e:
        raise ModelError("rank-deficient fit: singular normal equations", cause=e) from e
    return Poly2(beta1=float(beta[0] / scale**2), beta2=float(beta[1] / scale), beta3=float(beta[2]))


def fit_samples(samples: Sequence[Tuple[float, float]]) -> Poly2:
    """Convenience wrapper of ``fit_poly2`` for (p_in, p_out) pairs."""
    pairs = np.asarray(samples, dtype=float).reshape(-1, 2)
    return fit_poly2(pairs[:, 0], pairs[:, 1])


def fit_residual(model: Poly2, p_in: npt.ArrayLike, p_out: npt.ArrayLike) -> float:
    """Euclidean norm of the fit residual over the samples."""
    x = np.asarray(p_in, dtype=float)
    y = np.asarray(p_out, dtype=float)
    predicted = model.beta1 * x**2 + model.beta2 * x + model.beta3
    return float(np.linalg.norm(y - predicted))


def _raw_output(m: HarvesterModel, p: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    if isinstance(m, DiodeTaylor):
        # Received power P = E{y²}; a single tone has E{y⁴} = 1.5·P².
        c = model_coeffs(m)
        return c.c4 * 1.5 * p**2 + c.c2 * p
    if isinstance(m, Poly2):
        return m.beta1 * p**2 + m.beta2 * p + m.beta3
    if isinstance(m, Sigmoid):
        shifted = m.pi3 * expit(m.pi1 * (p - m.pi2))
        at_zero = m.pi3 * expit(-m.pi1 * m.pi2)
        return (shifted - at_zero) / expit(m.pi1 * m.pi2)
    if isinstance(m, Rational):
        numerator = m.eta3 * p**3 + m.eta2 * p**2 + m.eta1 * p
        denominator = m.q3 * p**3 + m.q2 * p**2 + m.q1 * p + m.q0
        if np.any(denominator == 0):
            raise ModelError("pole: rational model denominator vanishes", details={"p_in": p.tolist()})
        return numerator / denominator
    if isinstance(m, RationalSimplified):
        if m.theta1 == 0 or np.any(p + m.theta1 == 0):
            raise ModelError("pole: p_in + theta1 vanishes", details={"theta1": m.theta1})
        return (m.theta3 * p + m.theta2) / (p + m.theta1) - m.theta2 / m.theta1
    raise ModelError(f"unknown harvester model: {m!r}")


def eval_model(
    m: HarvesterModel, p_in: Union[float, npt.ArrayLike], clamp: bool = True
) -> Union[float, npt.NDArray[np.float64]]:
    """
    Evaluate a harvester model's output power at input power p_in (W).

    Args:
        m: Any harvester model.
        p_in: Input power, scalar or array, non-negative.
        clamp: Clamp the result below at zero for reporting.

    Raises:
        ValidationError: On negative input power.
        ModelError: At a pole of a rational model.
    """
    p = np.asarray(p_in, dtype=float)
    if np.any(p < 0):
        raise ValidationError("input power must be non-negative", "p_in", p_in)
    value = _raw_output(m, p)
    if clamp:
        value = np.maximum(value, 0.0)
    if value.ndim == 0:
        return float(value)
    return value
