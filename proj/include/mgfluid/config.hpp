// Copyright 2026 The mgfluid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "mgfluid/game.hpp"
#include "mgfluid/ode.hpp"
#include "mgfluid/reinforcer.hpp"
#include "mgfluid/wrapped.hpp"

namespace mgfluid {

struct RunParams {
  std::vector<std::int64_t> scales{100};
  double horizon = 1.0;
  int reps = 10;
  std::uint64_t seed = 1;
  std::uint64_t stride = 0;  // 0: default_stride(N)
  OdeMethod ode_method = OdeMethod::kRk4;
  long ode_steps = 0;  // 0: automatic
  int jobs = 1;
  int n_max = 200;
  std::optional<int> doeblin_k;
  int probe_samples = 64;
};

struct AcceptanceThresholds {
  std::optional<double> max_final_error;
  bool monotone_decrease = false;
  std::optional<double> min_improvement_factor;
  bool any() const {
    return max_final_error.has_value() || monotone_decrease || min_improvement_factor.has_value();
  }
};

struct ExperimentConfig {
  std::shared_ptr<const MarkovGame> game;  // null when only a raw matrix is given
  std::vector<ReinforcerPtr> reinforcers;
  RunParams run;
  bool doeblin_check = true;
  std::optional<Eigen::MatrixXd> matrix;
  std::optional<std::string> output_dir;
  AcceptanceThresholds acceptance;
  std::vector<std::string> warnings;
  // Effective document (after overrides), used for hashing.
  nlohmann::json document;

  // Throws ConfigError when the config carries no game.
  std::shared_ptr<const WrappedGame> wrapped() const;
  // Smallest exploration rate among Q-table reinforcers (nullopt if none).
  std::optional<double> min_epsilon() const;
};

// Parses a game object. Throws ConfigError on missing fields and
// StructuralError on shape mismatches. Rows within the stochastic tolerance
// are renormalized; other violations are kept for validate_game to report.
MarkovGame parse_game(const nlohmann::json& j);
nlohmann::json game_to_json(const MarkovGame& game);

// One entry per player, or a single entry applied to every player.
std::vector<ReinforcerPtr> parse_reinforcers(const nlohmann::json& j, const MarkovGame& game);

ExperimentConfig parse_config(const nlohmann::json& j,
                              const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace mgfluid
