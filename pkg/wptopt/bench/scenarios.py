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
Monte Carlo scenario runner.

Realization r draws its channels from streams seeded with
``SeedSequence(seed, spawn_key=(r, link, ...))``, link 0 for the harvester
and 1 for the information receiver (miso_sweep appends the antenna count).
Every grid point of a realization reuses the same draws, so curves are
compared on common random numbers and the result does not depend on how
realizations are spread across worker threads.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..core.channel import ChannelRealization, RicianParams, draw_links, flat_draw
from ..core.exceptions import WptOptError
from ..core.harvester import DiodeTaylor, ObjectiveCoeffs, Poly2, fit_poly2, model_coeffs, report_output
from ..core.units import saturation_budget
from ..optimization.qp import QpProblem, build_qp
from ..optimization.solvers import (
    BaselineKind,
    Solution,
    SolverOptions,
    baseline_alloc,
    evaluate_allocation,
    solve_bb,
    solve_milp_kkt,
)
from . import io
from .aggregation import Group, group_by
from .config import Scenario, ScenarioConfig, Strategy

logger = logging.getLogger(__name__)

MICROWATT = 1e-6
HARVESTER_LINK = 0
RECEIVER_LINK = 1


class SweepPoint(BaseModel):
    """Monte Carlo statistics of one strategy at one grid point."""

    model_config = ConfigDict(frozen=True)

    axis_value: float
    strategy: str
    mean_objective: float
    stderr: float
    realizations: int
    """Realizations that contributed a value."""

    infeasible: int = 0
    """Baseline allocations rejected by the saturation row."""

    failed: int = 0
    mean_nodes: float = 0.0
    mean_lps: float = 0.0


class FlaggedRealization(BaseModel):
    model_config = ConfigDict(frozen=True)

    axis_value: float
    realization: int
    strategy: str
    reason: str


class SupportAgreement(BaseModel):
    model_config = ConfigDict(frozen=True)

    axis_value: float
    fraction: float
    realizations: int


class AllocationRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    tone: int
    frequency_hz: float
    h_norm: float
    g_norm: Optional[float]
    strategy: str
    x_over_2p: float


class SweepResult(BaseModel):
    """Aggregated outcome of one scenario run."""

    model_config = ConfigDict(frozen=True)

    scenario: Scenario
    axis: str
    points: List[SweepPoint]
    flagged: List[FlaggedRealization] = []
    support: List[SupportAgreement] = []
    allocation: List[AllocationRow] = []
    files: List[Path] = []

    @property
    def has_flags(self) -> bool:
        return bool(self.flagged)

    def curve(self, strategy: str) -> List[SweepPoint]:
        """Points of one strategy in grid order."""
        return [point for point in self.points if point.strategy == strategy]

    def point(self, axis_value: float, strategy: str) -> SweepPoint:
        for candidate in self.points:
            if candidate.strategy == strategy and np.isclose(candidate.axis_value, axis_value, rtol=1e-12):
                return candidate
        raise KeyError(f"no point for {strategy} at {axis_value}")


@dataclass(frozen=True)
class Record:
    """Outcome of one strategy on one realization at one grid point."""

    axis_value: float
    strategy: str
    realization: int
    value: Optional[float] = None
    support: Tuple[int, ...] = ()
    x: Tuple[float, ...] = ()
    nodes: int = 0
    lps: int = 0
    infeasible: bool = False
    failure: Optional[str] = None


@dataclass(frozen=True)
class Context:
    cfg: ScenarioConfig
    strategies: List[Strategy]
    options: SolverOptions
    coeffs: ObjectiveCoeffs
    """Coefficients of the configured model."""

    diode_coeffs: ObjectiveCoeffs
    poly2_coeffs: ObjectiveCoeffs


def stream(seed: int, realization: int, link: int, *extra: int) -> np.random.Generator:
    """Random stream of one link of one realization."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(realization, link) + extra))


def _rician(cfg: ScenarioConfig, antennas: int) -> RicianParams:
    return RicianParams.from_db(cfg.kappa_db, seed=cfg.seed, n_tones=cfg.n_tones, n_antennas=antennas)


def _poly2_model(cfg: ScenarioConfig) -> Poly2:
    if cfg.poly2_samples is None:
        return cfg.poly2
    p_in, p_out = io.load_samples(cfg.poly2_samples)
    fitted = fit_poly2(p_in, p_out)
    logger.info("fitted second-order model from %s: %s", cfg.poly2_samples, fitted)
    return fitted


def _context(cfg: ScenarioConfig) -> Context:
    diode = model_coeffs(DiodeTaylor.from_diode(cfg.diode))
    needs_poly2 = cfg.model == "poly2" or cfg.scenario is Scenario.CURVEFIT_COMPARE
    poly2 = model_coeffs(_poly2_model(cfg)) if needs_poly2 else diode
    return Context(
        cfg=cfg,
        strategies=cfg.resolved_strategies(),
        options=SolverOptions(node_limit=cfg.node_limit),
        coeffs=poly2 if cfg.model == "poly2" else diode,
        poly2_coeffs=poly2,
        diode_coeffs=diode,
    )


def _solution_record(
    axis_value: float, label: str, r: int, sol: Solution, coeffs: ObjectiveCoeffs
) -> Record:
    return Record(
        axis_value=axis_value,
        strategy=label,
        realization=r,
        value=report_output(coeffs, sol.objective),
        support=sol.support,
        x=tuple(float(v) for v in sol.x),
        nodes=sol.stats.nodes_explored,
        lps=sol.stats.lps_solved,
    )


def run_strategies(
    ctx: Context,
    axis_value: float,
    r: int,
    h_eff: np.ndarray,
    P: float,
    coeffs: ObjectiveCoeffs,
    g_eff: Optional[np.ndarray] = None,
    p_sat: Optional[float] = None,
    prefix: str = "",
    suffix: str = "",
) -> List[Record]:
    """Evaluate every configured strategy on one problem instance."""
    records: List[Record] = []
    problem: Optional[QpProblem] = None
    for strategy in ctx.strategies:
        label = f"{prefix}{strategy.value}{suffix}"
        try:
            if problem is None:
                swipt = (g_eff, p_sat) if g_eff is not None and p_sat is not None else None
                problem = build_qp(h_eff, coeffs, P, swipt=swipt)
            if strategy is Strategy.OPTIMAL:
                records.append(_solution_record(axis_value, label, r, solve_bb(problem, ctx.options), coeffs))
            elif strategy is Strategy.MILP:
                records.append(_solution_record(axis_value, label, r, solve_milp_kkt(problem, ctx.options), coeffs))
            elif strategy is Strategy.OPTIMAL_UNCONSTRAINED:
                relaxed = build_qp(h_eff, coeffs, P)
                records.append(_solution_record(axis_value, label, r, solve_bb(relaxed, ctx.options), coeffs))
            else:
                s = baseline_alloc(BaselineKind(strategy.value), h_eff, P)
                evaluation = evaluate_allocation(s, problem)
                records.append(
                    Record(
                        axis_value=axis_value,
                        strategy=label,
                        realization=r,
                        value=report_output(coeffs, evaluation.objective) if evaluation.feasible else None,
                        support=tuple(int(i) for i in np.flatnonzero(s > 0)),
                        x=tuple(float(v) for v in s**2),
                        infeasible=not evaluation.feasible,
                    )
                )
        except WptOptError as e:
            logger.warning("realization %d, %s at %g failed: %s", r, label, axis_value, e)
            records.append(Record(axis_value=axis_value, strategy=label, realization=r, failure=str(e)))
    return records


def _links(ctx: Context, r: int, d_g: Optional[float], antennas: Optional[int] = None) -> ChannelRealization:
    cfg = ctx.cfg
    m = antennas if antennas is not None else cfg.antennas[0]
    extra = () if antennas is None else (antennas,)
    return draw_links(
        _rician(cfg, m),
        cfg.d_h,
        d_g,
        stream(cfg.seed, r, HARVESTER_LINK, *extra),
        stream(cfg.seed, r, RECEIVER_LINK, *extra),
    )


def _sweep_power(ctx: Context, r: int, swipt: bool) -> List[Record]:
    cfg = ctx.cfg
    channel = _links(ctx, r, cfg.d_g if swipt else None)
    h_eff, g_eff = channel.h_eff(), channel.g_eff()
    p_sat = cfg.p_sat_w if swipt else None
    records: List[Record] = []
    for p_eh in cfg.p_eh_uw:
        p_eh_w = p_eh * MICROWATT
        records += run_strategies(ctx, p_eh_w, r, h_eff, p_eh_w / channel.L_h, ctx.coeffs, g_eff, p_sat)
    return records


def _flat_channel(ctx: Context, r: int) -> List[Record]:
    cfg = ctx.cfg
    channel = flat_draw(cfg.n_tones, cfg.flat_variance, stream(cfg.seed, r, HARVESTER_LINK))
    h_eff = channel.h_eff()
    records: List[Record] = []
    for p_eh in cfg.p_eh_uw:
        p_eh_w = p_eh * MICROWATT
        records += run_strategies(ctx, p_eh_w, r, h_eff, p_eh_w / channel.L_h, ctx.coeffs)
    return records


def _miso_sweep(ctx: Context, r: int) -> List[Record]:
    cfg = ctx.cfg
    records: List[Record] = []
    for antennas in cfg.antennas:
        channel = _links(ctx, r, None, antennas)
        h_eff = channel.h_eff()
        for p_eh in cfg.p_eh_uw:
            p_eh_w = p_eh * MICROWATT
            records += run_strategies(
                ctx, p_eh_w, r, h_eff, p_eh_w / channel.L_h, ctx.coeffs, suffix=f"_m{antennas}"
            )
    return records


def _swipt_psat(ctx: Context, r: int) -> List[Record]:
    cfg = ctx.cfg
    channel = _links(ctx, r, cfg.d_g)
    h_eff, g_eff = channel.h_eff(), channel.g_eff()
    P = cfg.fixed_p_eh_uw * MICROWATT / channel.L_h
    records: List[Record] = []
    for p_sat_dbm in cfg.p_sat_dbm_grid:
        p_sat = saturation_budget(p_sat_dbm, cfg.info_margin_w)
        records += run_strategies(ctx, p_sat_dbm, r, h_eff, P, ctx.coeffs, g_eff, p_sat)
    return records


def _swipt_distance(ctx: Context, r: int) -> List[Record]:
    cfg = ctx.cfg
    records: List[Record] = []
    for d_g in cfg.d_g_grid:
        channel = _links(ctx, r, d_g)
        P = cfg.fixed_p_eh_uw * MICROWATT / channel.L_h
        records += run_strategies(ctx, d_g, r, channel.h_eff(), P, ctx.coeffs, channel.g_eff(), cfg.p_sat_w)
    return records


def _curvefit_compare(ctx: Context, r: int) -> List[Record]:
    cfg = ctx.cfg
    channel = _links(ctx, r, None)
    h_eff = channel.h_eff()
    records: List[Record] = []
    for p_eh in cfg.p_eh_uw:
        p_eh_w = p_eh * MICROWATT
        P = p_eh_w / channel.L_h
        records += run_strategies(ctx, p_eh_w, r, h_eff, P, ctx.diode_coeffs, prefix="diode_")
        records += run_strategies(ctx, p_eh_w, r, h_eff, P, ctx.poly2_coeffs, prefix="poly2_")
    return records


_DRIVERS: Dict[Scenario, Callable[[Context, int], List[Record]]] = {
    Scenario.SWEEP_POWER: lambda ctx, r: _sweep_power(ctx, r, ctx.cfg.swipt),
    Scenario.FLAT_CHANNEL: _flat_channel,
    Scenario.MISO_SWEEP: _miso_sweep,
    Scenario.SWIPT_POWER: lambda ctx, r: _sweep_power(ctx, r, True),
    Scenario.SWIPT_PSAT: _swipt_psat,
    Scenario.SWIPT_DISTANCE: _swipt_distance,
    Scenario.CURVEFIT_COMPARE: _curvefit_compare,
}

_AXES: Dict[Scenario, str] = {
    Scenario.SWIPT_PSAT: "p_sat_dbm",
    Scenario.SWIPT_DISTANCE: "d_g_wavelengths",
}


def _allocation_snapshot(ctx: Context) -> Tuple[List[Record], List[AllocationRow]]:
    cfg = ctx.cfg
    channel = _links(ctx, 0, cfg.d_g if cfg.swipt else None)
    h_eff, g_eff = channel.h_eff(), channel.g_eff()
    p_eh_w = cfg.alloc_p_eh_uw * MICROWATT
    P = p_eh_w / channel.L_h
    records = run_strategies(ctx, p_eh_w, 0, h_eff, P, ctx.coeffs, g_eff, cfg.p_sat_w if cfg.swipt else None)

    h_max = float(np.max(h_eff))
    frequencies = cfg.tone_grid.frequencies()
    rows: List[AllocationRow] = []
    for record in records:
        if not record.x:
            continue
        for tone, x in enumerate(record.x):
            rows.append(
                AllocationRow(
                    tone=tone,
                    frequency_hz=float(frequencies[tone]),
                    h_norm=float(h_eff[tone] / h_max),
                    g_norm=None if g_eff is None else float(g_eff[tone] / h_max),
                    strategy=record.strategy,
                    x_over_2p=x / (2.0 * P),
                )
            )
    return records, rows


def _points(records: List[Record]) -> List[SweepPoint]:
    points: List[SweepPoint] = []
    for group in group_by(records, key=lambda rec: (rec.axis_value, rec.strategy)):
        axis_value, strategy = group.key
        valid: Group[Tuple[float, str], Record] = Group(group.key, [rec for rec in group.values if rec.value is not None])
        infeasible = sum(1 for rec in group.values if rec.infeasible)
        failed = sum(1 for rec in group.values if rec.failure is not None)
        if valid.count() == 0:
            logger.warning("no usable realizations for %s at %g", strategy, axis_value)
            continue
        points.append(
            SweepPoint(
                axis_value=axis_value,
                strategy=strategy,
                mean_objective=valid.mean(lambda rec: rec.value),
                stderr=valid.stderr(lambda rec: rec.value),
                realizations=valid.count(),
                infeasible=infeasible,
                failed=failed,
                mean_nodes=valid.mean(lambda rec: rec.nodes),
                mean_lps=valid.mean(lambda rec: rec.lps),
            )
        )
    return points


def _support_agreement(records: List[Record]) -> List[SupportAgreement]:
    by_key = {
        (rec.axis_value, rec.realization, rec.strategy): rec
        for rec in records
        if rec.strategy in ("diode_optimal", "poly2_optimal") and rec.value is not None
    }
    pairs = [
        (axis_value, by_key[(axis_value, r, "diode_optimal")].support == rec.support)
        for (axis_value, r, strategy), rec in by_key.items()
        if strategy == "poly2_optimal" and (axis_value, r, "diode_optimal") in by_key
    ]
    agreement: List[SupportAgreement] = []
    for group in group_by(pairs, key=lambda pair: pair[0]):
        agreement.append(
            SupportAgreement(
                axis_value=group.key,
                fraction=group.fraction(lambda pair: pair[1]),
                realizations=group.count(),
            )
        )
    return agreement


def run_scenario(cfg: ScenarioConfig, out_dir: Optional[Union[str, Path]] = None) -> SweepResult:
    """
    Run one scenario and, when ``out_dir`` is given, write its CSV files.

    Failed solves are logged, excluded from the means and listed in
    ``SweepResult.flagged``; the run itself continues.
    """
    ctx = _context(cfg)
    logger.info(
        "running %s with %d realizations on %d tones from %.6g Hz",
        cfg.scenario.value,
        cfg.realizations,
        cfg.n_tones,
        cfg.f0_hz,
    )
    allocation: List[AllocationRow] = []
    if cfg.scenario is Scenario.ALLOC_SINGLE_REALIZATION:
        records, allocation = _allocation_snapshot(ctx)
    else:
        task = partial(_DRIVERS[cfg.scenario], ctx)
        realizations = range(cfg.realizations)
        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                batches = list(pool.map(task, realizations))
        else:
            batches = [task(r) for r in realizations]
        records = [record for batch in batches for record in batch]

    flagged = [
        FlaggedRealization(axis_value=rec.axis_value, realization=rec.realization, strategy=rec.strategy, reason=rec.failure)
        for rec in records
        if rec.failure is not None
    ]
    support = _support_agreement(records) if cfg.scenario is Scenario.CURVEFIT_COMPARE else []
    result = SweepResult(
        scenario=cfg.scenario,
        axis=_AXES.get(cfg.scenario, "p_eh_w"),
        points=_points(records),
        flagged=flagged,
        support=support,
        allocation=allocation,
    )
    if out_dir is not None:
        result = result.model_copy(update={"files": write_outputs(result, Path(out_dir))})
    if flagged:
        logger.warning("%d flagged realizations in %s", len(flagged), cfg.scenario.value)
    return result


def write_outputs(result: SweepResult, out_dir: Path) -> List[Path]:
    """Write sweep.csv plus the scenario's extra CSV files."""
    files = [
        io.write_sweep(
            [(p.axis_value, p.strategy, p.mean_objective, p.stderr, p.realizations) for p in result.points],
            result.axis,
            out_dir / "sweep.csv",
        )
    ]
    if result.allocation:
        files.append(
            io.write_allocation(
                [(row.tone, row.h_norm, row.g_norm, row.strategy, row.x_over_2p) for row in result.allocation],
                out_dir / "alloc.csv",
            )
        )
    if result.support:
        files.append(
            io.write_support(
                [(row.axis_value, row.fraction, row.realizations) for row in result.support],
                out_dir / "support.csv",
            )
        )
    return files
