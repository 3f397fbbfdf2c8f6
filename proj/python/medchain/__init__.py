# Copyright 2026 The medchain Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python access to the medchain simulator."""

import json

from ._core import (
    SCENARIO_COUNT,
    MedchainError,
    cli,
    compare,
    run_report,
    scenario,
    sha256_hex,
    verify_dump,
)

__all__ = [
    "SCENARIO_COUNT",
    "MedchainError",
    "cli",
    "compare",
    "run",
    "run_report",
    "scenario",
    "sha256_hex",
    "verify_dump",
]


def run(scenario_id, seed=1, concurrent=False):
    """Runs a built-in scenario and returns its report as a dict."""
    return json.loads(run_report(scenario_id, seed, concurrent, "json"))
