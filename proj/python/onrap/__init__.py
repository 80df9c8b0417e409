# Copyright 2026 The ONRAP Authors
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

"""Occupancy-grid local path planning with a risk-aware NLP."""

from onrap._onrap import (
    ConfigError,
    DomainError,
    check_parameters,
    implied_max_deviation,
    lambda_grid_lower_bound,
    max_lateral_deviation,
    plan,
    risk_kernel,
    rollout,
    run_episode,
    run_monte_carlo,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "check_parameters",
    "implied_max_deviation",
    "lambda_grid_lower_bound",
    "max_lateral_deviation",
    "plan",
    "risk_kernel",
    "rollout",
    "run_episode",
    "run_monte_carlo",
]
