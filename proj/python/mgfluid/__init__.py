# Copyright 2026 The mgfluid Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Q-learning in Markov games and the ODE fluid limit of the learning dynamics."""

from ._core import (
    ComparisonReport,
    ConfigError,
    DriftEvaluationError,
    ErgodicityError,
    FitError,
    ParameterError,
    StructuralError,
    TrajectoryRecord,
    WrappedGame,
    __version__,
    beta,
    beta_gap,
    coupled_disagreement,
    doeblin_certificate,
    initial_distribution,
    integrate,
    integrate_field,
    load_config,
    mc_sup_error,
    mixing_curve,
    occupancy_error,
    parse_config,
    power_iteration_stationary,
    rate_fit,
    run_cli,
    sample_trajectory,
    stationary_distribution,
    stationary_residual,
    transition_matrix,
    wrapped_stationary,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
