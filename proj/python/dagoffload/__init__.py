# Copyright 2026 The dagoffload Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""DAG offloading simulator and baseline schedulers."""

import json

from ._core import DagoffloadError, compute_gae
from . import _core

__all__ = ["DagoffloadError", "compute_gae", "generate_dag", "evaluate_plan", "schedule"]


def _text(dag):
    return dag if isinstance(dag, str) else json.dumps(dag)


def generate_dag(n=20, fat=0.5, density=0.5, ccr=0.4, seed=0):
    return json.loads(_core.generate_dag(n, fat, density, ccr, seed))


def evaluate_plan(dag, plan, rate_up_mbps=8.5, rate_do_mbps=8.5):
    return json.loads(_core.evaluate_plan(_text(dag), plan, rate_up_mbps, rate_do_mbps))


def schedule(dag, algorithm, rate_up_mbps=8.5, rate_do_mbps=8.5, seed=0, oracle_cap=20):
    return json.loads(_core.schedule(_text(dag), algorithm, rate_up_mbps, rate_do_mbps, seed, oracle_cap))
