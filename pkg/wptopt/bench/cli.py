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
Command-line entry point.

    wptopt solve --config FILE [--seed N] [--out DIR]
    wptopt bench --scenario TAG [--config FILE] [--seed N] [--out DIR]
    wptopt fit --data FILE

Exit status is 0 on success, 1 when any realization was flagged and 2 for
configuration, input-data or any other error that stops the run.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from ..core.exceptions import WptOptError
from ..core.harvester import fit_poly2, fit_residual
from .config import Scenario, ScenarioConfig, load_config
from .io import load_samples
from .scenarios import SweepResult, run_scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FLAGGED = 1
EXIT_CONFIG = 2


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="master seed (overrides the configuration)")
    parser.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    parser.add_argument("--realizations", type=int, help="Monte Carlo realizations")
    parser.add_argument("--workers", type=int, help="worker threads")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wptopt",
        description="Globally optimal multi-tone WPT waveform allocation",
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging verbosity",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="run the scenario described by a configuration file")
    solve.add_argument("--config", type=Path, required=True)
    _add_run_options(solve)

    bench = commands.add_parser("bench", help="run a named scenario")
    bench.add_argument("--scenario", required=True, choices=[s.value for s in Scenario])
    bench.add_argument("--config", type=Path)
    _add_run_options(bench)

    fit = commands.add_parser("fit", help="fit a second-order harvester model to samples")
    fit.add_argument("--data", type=Path, required=True)
    return parser


def _report(result: SweepResult) -> None:
    for path in result.files:
        print(path)
    for flag in result.flagged:
        print(
            f"flagged: {flag.strategy} realization {flag.realization} at {flag.axis_value:g}: {flag.reason}",
            file=sys.stderr,
        )


def _run(cfg: ScenarioConfig, args: argparse.Namespace) -> int:
    cfg = cfg.with_overrides(seed=args.seed, realizations=args.realizations, workers=args.workers)
    result = run_scenario(cfg, args.out)
    _report(result)
    return EXIT_FLAGGED if result.has_flags else EXIT_OK


def _fit(args: argparse.Namespace) -> int:
    p_in, p_out = load_samples(args.data)
    model = fit_poly2(p_in, p_out)
    summary = {
        "beta1": model.beta1,
        "beta2": model.beta2,
        "beta3": model.beta3,
        "residual_norm": fit_residual(model, p_in, p_out),
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "fit":
            return _fit(args)
        if args.command == "solve":
            cfg = load_config(args.config)
        else:
            base = load_config(args.config) if args.config else ScenarioConfig()
            cfg = base.with_overrides(scenario=Scenario(args.scenario))
        return _run(cfg, args)
    except WptOptError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
