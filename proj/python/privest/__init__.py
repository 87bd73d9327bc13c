# Copyright 2026 The privest Authors
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
"""Python bindings for the privest C++ core."""

from privest._core import (
    ConfigError,
    DomainError,
    Error,
    IoError,
    NoiseFamily,
    NoiseSchedule,
    NumericError,
    ValidationError,
    __version__,
    cli,
    eta_numeric,
    improvement_factor,
    load_config,
    load_config_string,
    log_grid,
    rate_fit,
    tradeoff_params,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "Error",
    "IoError",
    "NoiseFamily",
    "NoiseSchedule",
    "NumericError",
    "ValidationError",
    "__version__",
    "cli",
    "eta_numeric",
    "improvement_factor",
    "load_config",
    "load_config_string",
    "log_grid",
    "rate_fit",
    "tradeoff_params",
]
