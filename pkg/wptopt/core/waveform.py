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
Multi-tone signal algebra.

The transmitted waveform is a sum of N cosines on a uniform frequency comb.
Amplitude vectors use the convention that ½‖s‖² is the transmit power in
watts, and all moment formulas assume the tones arrive phase-aligned.
"""

from typing import Tuple

import numpy as np
import numpy.typing as npt
from pydantic import ConfigDict, Field

from .exceptions import DegenerateChannelError, UndersampledError, ValidationError
from .model import DomainModel

ToneAmplitudes = npt.NDArray[np.float64]
PhaseVector = npt.NDArray[np.float64]

DEFAULT_SAMPLES = 4096


class ToneGrid(DomainModel):
    """Frequency comb of the WPT signal."""

    model_config = ConfigDict(frozen=True)

    f0: float = Field(default=2.4e9, gt=0)
    """Carrier frequency of the first tone in Hz."""

    delta_f: float = Field(default=1.25e6, gt=0)
    """Tone spacing in Hz."""

    n_tones: int = Field(default=8, ge=1)
    """Number of tones N."""

    @property
    def period(self) -> float:
        """Fundamental period of the multisine in seconds."""
        return 1.0 / self.delta_f

    def frequencies(self) -> npt.NDArray[np.float64]:
        """Tone frequencies f0 + (n-1)·Δf for n = 1..N."""
        return self.f0 + self.delta_f * np.arange(self.n_tones, dtype=float)

    def harmonic_indices(self) -> npt.NDArray[np.int64]:
        """
        Integer harmonic index of each tone relative to Δf.

        Raises:
            ValidationError: If f0 is not an integer multiple of Δf, in which
                case the signal is not periodic in 1/Δf.
        """
        ratio = self.f0 / self.delta_f
        first = int(round(ratio))
        if first < 1 or abs(ratio - first) > 1e-9 * max(1.0, ratio):
            raise ValidationError(
                "carrier frequency must be a positive multiple of the tone spacing",
                "f0",
                self.f0,
            )
        return first + np.arange(self.n_tones, dtype=np.int64)


def _as_vector(values: npt.ArrayLike, name: str) -> npt.NDArray[np.float64]:
    vector = np.asarray(values, dtype=float)
    if vector.ndim != 1:
        raise ValidationError(f"{name} must be a one-dimensional vector", name, vector.shape)
    return vector


def _check_lengths(**vectors: npt.NDArray[np.float64]) -> None:
    lengths = {name: len(v) for name, v in vectors.items()}
    if len(set(lengths.values())) > 1:
        raise ValidationError(f"vector lengths differ: {lengths}", ",".join(lengths), lengths)


def optimal_phases(channel_phases: npt.ArrayLike) -> PhaseVector:
    """Transmit phases that align every received tone at phase zero."""
    return -_as_vector(channel_phases, "channel_phases")


def matched_beamformer_weights(h_row: npt.ArrayLike, amplitude: float) -> npt.NDArray[np.complex128]:
    """
    Per-antenna weights of the matched beamformer for one tone.

    Args:
        h_row: Complex channel gains of the tone across M antennas.
        amplitude: Tone amplitude s_n.

    Returns:
        Weights w with ‖w‖ = amplitude and h_row · w = amplitude·‖h_row‖.

    Raises:
        DegenerateChannelError: If the channel row is all zeros.
        ValidationError: If the amplitude is negative.
    """
    row = np.asarray(h_row, dtype=complex).ravel()
    if amplitude < 0:
        raise ValidationError("amplitude must be non-negative", "amplitude", amplitude)
    norm = float(np.linalg.norm(row))
    if norm == 0.0:
        raise DegenerateChannelError("degenerate channel: zero gain on every antenna")
    return amplitude * np.conj(row) / norm


def _as_matrix(H: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    matrix = np.asarray(H, dtype=complex)
    if matrix.ndim == 1:
        matrix = matrix[:, np.newaxis]
    if matrix.ndim != 2:
        raise ValidationError("channel must be an N x M matrix", "H", matrix.shape)
    return matrix


def effective_channels(H: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Scalar channel gain ‖h_n‖ of each tone after matched beamforming."""
    return np.linalg.norm(_as_matrix(H), axis=1)


def leakage_gains(H: npt.ArrayLike, G: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """
    Information-receiver gain per tone when the transmitter beams toward the harvester.

    Each entry is |g_n · h_nᴴ| / ‖h_n‖; for a single antenna this is |g_n|.
    """
    h = _as_matrix(H)
    g = _as_matrix(G)
    if h.shape != g.shape:
        raise ValidationError("harvester and receiver channels differ in shape", "G", g.shape)
    norms = np.linalg.norm(h, axis=1)
    if np.any(norms == 0):
        raise DegenerateChannelError("degenerate channel: zero harvester gain on a tone")
    return np.abs(np.sum(g * np.conj(h), axis=1)) / norms


def analytic_moments(s: npt.ArrayLike, h_eff: npt.ArrayLike) -> Tuple[float, float]:
    """
    Second and fourth moments of the received phase-aligned multisine.

    The fourth moment keeps the terms in which tones pair up. On a uniform
    comb of three or more tones the exact time average also has
    intermodulation terms (f_1 + f_3 = 2·f_2, ...), all non-negative for
    aligned phases, so m4 here is a lower bound on ``numeric_moments``.

    Returns:
        (m2, m4) with m2 = ½Σ s²h² and m4 = (3/8)Σ(s²h²)² + (3/4)Σ_{i≠j} s_i²h_i²s_j²h_j².
    """
    amplitudes = _as_vector(s, "s")
    gains = _as_vector(h_eff, "h_eff")
    _check_lengths(s=amplitudes, h_eff=gains)
    a = amplitudes**2 * gains**2
    total = float(np.sum(a))
    squares = float(np.sum(a**2))
    m2 = 0.5 * total
    m4 = 0.375 * squares + 0.75 * (total * total - squares)
    return m2, m4


def numeric_moments(
    s: npt.ArrayLike,
    h_eff: npt.ArrayLike,
    phases: npt.ArrayLike,
    grid: ToneGrid,
    n_samples: int = DEFAULT_SAMPLES,
) -> Tuple[float, float]:
    """
    Time averages of y² and y⁴ over one fundamental period.

    y(t) = Σ s_i h_i cos(2π f_i t + φ_i) is sampled uniformly at n_samples
    points of [0, 1/Δf). Sample phases are reduced modulo the period in
    integer arithmetic so carrier-scale frequencies keep full precision.

    Raises:
        UndersampledError: If n_samples cannot resolve the fourth power of
            the highest harmonic, or is below 4·N·k_max.
    """
    amplitudes = _as_vector(s, "s")
    gains = _as_vector(h_eff, "h_eff")
    phi = _as_vector(phases, "phases")
    _check_lengths(s=amplitudes, h_eff=gains, phases=phi)
    if len(amplitudes) != grid.n_tones:
        raise ValidationError("amplitude count differs from the tone grid", "s", len(amplitudes))

    harmonics = grid.harmonic_indices()
    k_max = int(harmonics[-1])
    required = max(4 * grid.n_tones * k_max, 4 * k_max + 1)
    if n_samples < required:
        raise UndersampledError(
            f"undersampled: {n_samples} samples, at least {required} needed",
            details={"n_samples": n_samples, "required": required},
        )

    sample_index = np.arange(n_samples, dtype=np.int64)
    cycles = np.mod(np.outer(sample_index, harmonics), n_samples)
    angles = 2.0 * np.pi * cycles / n_samples + phi
    y = np.cos(angles) @ (amplitudes * gains)
    y2 = y * y
    return float(np.mean(y2)), float(np.mean(y2 * y2))


def received_power_at_ir(s: npt.ArrayLike, g_eff: npt.ArrayLike) -> float:
    """Average power ½Σ s²g² delivered to the information receiver in watts."""
    amplitudes = _as_vector(s, "s")
    gains = _as_vector(g_eff, "g_eff")
    _check_lengths(s=amplitudes, g_eff=gains)
    return 0.5 * float(np.sum(amplitudes**2 * gains**2))
