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
CSV ingestion and export.

Layouts:

- channel: ``tone,antenna,link,re,im`` with link ``H`` or ``G``
- harvester samples: ``p_in_w,p_out_w``
- sweep results: ``<axis>,strategy,mean_objective,stderr,realizations``
- allocation snapshot: ``tone,h_norm,g_norm,strategy,x_over_2p``
- support agreement: ``p_eh_w,support_agreement,realizations``

Floats are written with 12 significant digits so reruns are byte-identical.
"""

import logging
from pathlib import Path
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..core.channel import ChannelRealization
from ..core.exceptions import DataFormatError, ValidationError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"
CHANNEL_COLUMNS = ["tone", "antenna", "link", "re", "im"]
SAMPLE_COLUMNS = ["p_in_w", "p_out_w"]
SWEEP_COLUMNS = ["strategy", "mean_objective", "stderr", "realizations"]
ALLOC_COLUMNS = ["tone", "h_norm", "g_norm", "strategy", "x_over_2p"]
SUPPORT_COLUMNS = ["p_eh_w", "support_agreement", "realizations"]

PathLike = Union[str, Path]


def _read(path: PathLike, columns: List[str]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataFormatError(f"cannot read {path}: {e}", path=str(path), cause=e) from e
    if list(frame.columns) != columns:
        raise DataFormatError(
            f"{path} must have header {','.join(columns)}, found {','.join(map(str, frame.columns))}",
            path=str(path),
        )
    return frame


def _write(frame: pd.DataFrame, path: PathLike) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(target, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
    logger.debug("wrote %d rows to %s", len(frame), target)
    return target


def save_channel(channel: ChannelRealization, path: PathLike) -> Path:
    """Write H and, if present, G one entry per row."""
    rows: List[Tuple[int, int, str, float, float]] = []
    for link, matrix in (("H", channel.H), ("G", channel.G)):
        if matrix is None:
            continue
        for (tone, antenna), value in np.ndenumerate(matrix):
            rows.append((tone, antenna, link, float(value.real), float(value.imag)))
    return _write(pd.DataFrame(rows, columns=CHANNEL_COLUMNS), path)


def load_channel(path: PathLike, L_h: float = 1.0, L_g: Optional[float] = None) -> ChannelRealization:
    """
    Read a channel written by ``save_channel``.

    Path-loss factors are not part of the file and are supplied by the caller.

    Raises:
        DataFormatError: On a wrong header, unknown link tag or missing entries.
    """
    frame = _read(path, CHANNEL_COLUMNS)
    try:
        tones = frame["tone"].astype(int)
        antennas = frame["antenna"].astype(int)
        values = frame["re"].astype(float) + 1j * frame["im"].astype(float)
    except (TypeError, ValueError) as e:
        raise DataFormatError(f"{path} has unparsable entries", path=str(path), cause=e) from e
    unknown = set(frame["link"]) - {"H", "G"}
    if unknown:
        raise DataFormatError(f"{path} has unknown link tags {sorted(unknown)}", path=str(path))
    if len(frame) == 0 or (tones < 0).any() or (antennas < 0).any():
        raise DataFormatError(f"{path} has no valid channel entries", path=str(path))

    shape = (int(tones.max()) + 1, int(antennas.max()) + 1)
    matrices = {}
    for link in ("H", "G"):
        mask = (frame["link"] == link).to_numpy()
        if not mask.any():
            continue
        if mask.sum() != shape[0] * shape[1]:
            raise DataFormatError(f"{path} link {link} does not cover a full {shape} matrix", path=str(path))
        matrix = np.zeros(shape, dtype=complex)
        matrix[tones[mask].to_numpy(), antennas[mask].to_numpy()] = values[mask].to_numpy()
        matrices[link] = matrix
    if "H" not in matrices:
        raise DataFormatError(f"{path} has no harvester link", path=str(path))
    try:
        return ChannelRealization(
            H=matrices["H"], G=matrices.get("G"), L_h=L_h, L_g=L_g if "G" in matrices else None
        )
    except ValidationError as e:
        raise DataFormatError(f"{path} does not describe a valid channel: {e}", path=str(path), cause=e) from e


def load_samples(path: PathLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    Read harvester (input power, output power) samples in watts.

    Raises:
        DataFormatError: On a wrong header or non-numeric values.
    """
    frame = _read(path, SAMPLE_COLUMNS)
    try:
        p_in = frame["p_in_w"].astype(float).to_numpy()
        p_out = frame["p_out_w"].astype(float).to_numpy()
    except (TypeError, ValueError) as e:
        raise DataFormatError(f"{path} has non-numeric samples", path=str(path), cause=e) from e
    if not (np.all(np.isfinite(p_in)) and np.all(np.isfinite(p_out))):
        raise DataFormatError(f"{path} has missing or non-finite samples", path=str(path))
    return p_in, p_out


def write_sweep(rows: Sequence[Tuple[Any, str, float, float, int]], axis: str, path: PathLike) -> Path:
    """Write one row per (grid point, strategy)."""
    return _write(pd.DataFrame(list(rows), columns=[axis] + SWEEP_COLUMNS), path)


def write_allocation(rows: Sequence[Tuple[int, float, Optional[float], str, float]], path: PathLike) -> Path:
    return _write(pd.DataFrame(list(rows), columns=ALLOC_COLUMNS), path)


def write_support(rows: Sequence[Tuple[float, float, int]], path: PathLike) -> Path:
    return _write(pd.DataFrame(list(rows), columns=SUPPORT_COLUMNS), path)
