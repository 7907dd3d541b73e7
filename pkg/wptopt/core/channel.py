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
Stochastic channel generation.

Rician fading with free-space path loss for the harvester link and the
information-receiver link, plus a near-flat real-valued channel. Random
streams are caller-owned ``numpy.random.Generator`` instances.
"""

import math
from typing import Any, Optional

import numpy as np
import numpy.typing as npt
from pydantic import ConfigDict, Field, model_validator

from .exceptions import ValidationError
from .model import DomainModel
from .units import db_to_linear
from .waveform import effective_channels, leakage_gains


def path_loss(d_over_lambda: float) -> float:
    """
    Free-space path loss (1/(4π·d))² for a distance in wavelengths.

    Raises:
        ValidationError: If the distance is not positive.
    """
    if d_over_lambda <= 0:
        raise ValidationError("distance must be positive", "d_over_lambda", d_over_lambda)
    return (1.0 / (4.0 * math.pi * d_over_lambda)) ** 2


class RicianParams(DomainModel):
    """Parameters of a Rician fading draw."""

    model_config = ConfigDict(frozen=True)

    kappa: float = Field(ge=0)
    """Linear Rice factor (LOS to scattered power ratio)."""

    seed: int = Field(default=0, ge=0)
    """Seed used when the caller does not supply a stream."""

    n_tones: int = Field(default=8, ge=1)
    n_antennas: int = Field(default=1, ge=1)

    @classmethod
    def from_db(cls, kappa_db: float, **kwargs: Any) -> "RicianParams":
        """Build parameters from a Rice factor in dB."""
        return cls(kappa=db_to_linear(kappa_db), **kwargs)


class ChannelRealization(DomainModel):
    """
    One draw of the harvester link H and the optional information link G.

    H and G are N×M complex matrices. Distances are in wavelengths and are
    None for synthetic channels without a geometric model.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    H: np.ndarray
    G: Optional[np.ndarray] = None
    d_h: Optional[float] = None
    d_g: Optional[float] = None
    L_h: float = 1.0
    L_g: Optional[float] = None

    @model_validator(mode="before")
    @classmethod
    def _coerce_arrays(cls, data: Any) -> Any:
        if isinstance(data, dict):
            data = dict(data)
            for key in ("H", "G"):
                if data.get(key) is not None:
                    matrix = np.array(data[key], dtype=complex)
                    if matrix.ndim == 1:
                        matrix = matrix[:, np.newaxis]
                    matrix.setflags(write=False)
                    data[key] = matrix
        return data

    @model_validator(mode="after")
    def _check_consistency(self) -> "ChannelRealization":
        if self.H.ndim != 2 or self.H.size == 0:
            raise ValueError("H must be a non-empty N x M matrix")
        if self.G is not None and self.G.shape != self.H.shape:
            raise ValueError(f"G shape {self.G.shape} differs from H shape {self.H.shape}")
        for name, value in (("L_h", self.L_h), ("L_g", self.L_g)):
            if value is not None and not 0.0 < value <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {value}")
        return self

    @property
    def n_tones(self) -> int:
        return int(self.H.shape[0])

    @property
    def n_antennas(self) -> int:
        return int(self.H.shape[1])

    def h_eff(self) -> npt.NDArray[np.float64]:
        """Effective harvester gain per tone under matched beamforming."""
        return effective_channels(self.H)

    def g_eff(self) -> Optional[npt.NDArray[np.float64]]:
        """Effective information-receiver gain per tone, or None without G."""
        if self.G is None:
            return None
        return leakage_gains(self.H, self.G)


def _rician_matrix(
    params: RicianParams, gain: float, rng: np.random.Generator
) -> npt.NDArray[np.complex128]:
    kappa = params.kappa
    los = math.sqrt(kappa / (kappa + 1.0))
    scatter_std = math.sqrt(1.0 / (2.0 * (kappa + 1.0)))
    draws = rng.standard_normal((params.n_tones, params.n_antennas, 2))
    scatter = scatter_std * (draws[..., 0] + 1j * draws[..., 1])
    return math.sqrt(gain) * (los + scatter)


def rician_draw(
    params: RicianParams,
    L_P: float,
    rng: Optional[np.random.Generator] = None,
    d_over_lambda: Optional[float] = None,
) -> ChannelRealization:
    """
    Draw a Rician harvester channel h = √L_P · Z with Z ~ CN(√(κ/(κ+1)), 1/(κ+1)).

    The complex variance is split evenly between the real and imaginary
    parts and the LOS mean sits on the real axis.

    Args:
        params: Rice factor and dimensions.
        L_P: Linear path-loss factor in (0, 1].
        rng: Random stream; defaults to one seeded from ``params.seed``.
        d_over_lambda: Distance recorded as metadata.
    """
    stream = rng if rng is not None else np.random.default_rng(params.seed)
    try:
        return ChannelRealization(H=_rician_matrix(params, L_P, stream), d_h=d_over_lambda, L_h=L_P)
    except ValidationError as e:
        raise ValidationError(f"invalid channel realization: {e}", "L_P", L_P, cause=e) from e


def draw_links(
    params: RicianParams,
    d_h: float,
    d_g: Optional[float],
    rng_h: np.random.Generator,
    rng_g: Optional[np.random.Generator] = None,
) -> ChannelRealization:
    """
    Draw the harvester link and, when d_g is given, an independent receiver link.

    Both links follow the same Rician law with their own path loss; G uses
    its own stream so the harvester draw does not depend on whether G exists.
    """
    harvester = rician_draw(params, path_loss(d_h), rng_h, d_over_lambda=d_h)
    if d_g is None:
        return harvester
    if rng_g is None:
        raise ValidationError("a separate stream is required for the receiver link", "rng_g", None)
    L_g = path_loss(d_g)
    return harvester.model_copy(
        update={"G": _frozen(_rician_matrix(params, L_g, rng_g)), "d_g": d_g, "L_g": L_g}
    )


def _frozen(matrix: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
    matrix.setflags(write=False)
    return matrix


def flat_draw(n_tones: int, sigma: float, rng: np.random.Generator) -> ChannelRealization:
    """
    Draw a near-flat real channel with gains ~ N(1, sigma) clamped at zero.

    ``sigma`` is the variance of the gain. The result has one antenna and
    unit path loss.
    """
    if sigma < 0:
        raise ValidationError("variance must be non-negative", "sigma", sigma)
    if n_tones < 1:
        raise ValidationError("at least one tone is required", "n_tones", n_tones)
    gains = 1.0 + math.sqrt(sigma) * rng.standard_normal(n_tones)
    gains = np.maximum(gains, 0.0)
    return ChannelRealization(H=gains.astype(complex)[:, np.newaxis])
