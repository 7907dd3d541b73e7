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

"""Monte Carlo experiment harness."""

from .config import Scenario, ScenarioConfig, Strategy, load_config
from .scenarios import SweepPoint, SweepResult, run_scenario

__all__ = [
    "Scenario",
    "ScenarioConfig",
    "Strategy",
    "SweepPoint",
    "SweepResult",
    "load_config",
    "run_scenario",
]
