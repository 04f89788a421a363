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

#include "mgfluid/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "mgfluid/errors.hpp"

namespace mgfluid {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string(where) + ": missing field '" + key + "'");
  }
  return j.at(key);
}

template <typename T>
T get_as(const json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

std::vector<std::int64_t> parse_scales(const json& j) {
  std::vector<std::int64_t> out;
  auto one = [&](const json& v) {
    if (!v.is_number()) throw ConfigError("run.N entries must be numbers");
    const double d = v.get<double>();
    if (!(d >= 1.0) || std::floor(d) != d) {
      throw ConfigError("run.N entries must be integers >= 1, got " + v.dump());
    }
    out.push_back(static_cast<std::int64_t>(d));
  };
  if (j.is_array()) {
    for (const auto& v : j) one(v);
  } else {
    one(j);
  }
  if (out.empty()) throw ConfigError("run.N must list at least one scale");
  return out;
}

}  // namespace

MarkovGame parse_game(const json& j) {
  const int n_states = get_as<int>(require(j, "n_states", "game"), "game.n_states");
  const auto n_actions = get_as<std::vector<int>>(require(j, "n_actions", "game"), "game.n_actions");
  if (j.contains("n_players")) {
    const int n_players = get_as<int>(j.at("n_players"), "game.n_players");
    if (n_players != static_cast<int>(n_actions.size())) {
      throw StructuralError("game.n_players = " + std::to_string(n_players) + " but n_actions lists " +
                            std::to_string(n_actions.size()) + " players");
    }
  }
  int n_joint = 1;
  for (int a : n_actions) n_joint *= std::max(a, 0);

  const auto t3 = get_as<std::vector<std::vector<std::vector<double>>>>(
      require(j, "transition", "game"), "game.transition");
  if (static_cast<int>(t3.size()) != n_states) {
    throw StructuralError("game.transition has " + std::to_string(t3.size()) +
                          " state blocks, expected " + std::to_string(n_states));
  }
  std::vector<double> transition;
  for (std::size_t s = 0; s < t3.size(); ++s) {
    if (static_cast<int>(t3[s].size()) != n_joint) {
      throw StructuralError("game.transition[" + std::to_string(s) + "] has " +
                            std::to_string(t3[s].size()) + " joint actions, expected " +
                            std::to_string(n_joint));
    }
    for (std::size_t a = 0; a < t3[s].size(); ++a) {
      if (static_cast<int>(t3[s][a].size()) != n_states) {
        throw StructuralError("game.transition[" + std::to_string(s) + "][" + std::to_string(a) +
                              "] has " + std::to_string(t3[s][a].size()) +
                              " entries, expected " + std::to_string(n_states));
      }
      transition.insert(transition.end(), t3[s][a].begin(), t3[s][a].end());
    }
  }

  const auto r3 = get_as<std::vector<std::vector<std::vector<double>>>>(
      require(j, "rewards", "game"), "game.rewards");
  std::vector<std::vector<double>> rewards;
  for (std::size_t p = 0; p < r3.size(); ++p) {
    std::vector<double> flat;
    if (static_cast<int>(r3[p].size()) != n_states) {
      throw StructuralError("game.rewards[" + std::to_string(p) + "] has " +
                            std::to_string(r3[p].size()) + " states, expected " +
                            std::to_string(n_states));
    }
    for (std::size_t s = 0; s < r3[p].size(); ++s) {
      if (static_cast<int>(r3[p][s].size()) != n_joint) {
        throw StructuralError("game.rewards[" + std::to_string(p) + "][" + std::to_string(s) +
                              "] has " + std::to_string(r3[p][s].size()) +
                              " joint actions, expected " + std::to_string(n_joint));
      }
      flat.insert(flat.end(), r3[p][s].begin(), r3[p][s].end());
    }
    rewards.push_back(std::move(flat));
  }

  auto init = get_as<std::vector<double>>(require(j, "initial_law", "game"), "game.initial_law");
  MarkovGame game(n_states, n_actions, std::move(transition), std::move(rewards), std::move(init));
  return renormalized(game);
}

json game_to_json(const MarkovGame& game) {
  const int S = game.num_states();
  const int A = game.num_joint_actions();
  json t = json::array();
  for (int s = 0; s < S; ++s) {
    json block = json::array();
    for (int a = 0; a < A; ++a) {
      const auto row = game.transition_row(s, a);
      block.push_back(std::vector<double>(row.begin(), row.end()));
    }
    t.push_back(block);
  }
  json r = json::array();
  for (int p = 0; p < game.num_players(); ++p) {
    json per_state = json::array();
    for (int s = 0; s < S; ++s) {
      std::vector<double> row;
      for (int a = 0; a < A; ++a) row.push_back(game.reward(p, s, a));
      per_state.push_back(row);
    }
    r.push_back(per_state);
  }
  return json{{"n_players", game.num_players()},
              {"n_states", S},
              {"n_actions", game.indexer().action_counts()},
              {"transition", t},
              {"rewards", r},
              {"initial_law", game.initial_law()}};
}

std::vector<ReinforcerPtr> parse_reinforcers(const json& j, const MarkovGame& game) {
  if (!j.is_array() || j.empty()) throw ConfigError("reinforcers must be a non-empty array");
  const int n_players = game.num_players();
  if (j.size() != 1 && static_cast<int>(j.size()) != n_players) {
    throw ConfigError("expected 1 or " + std::to_string(n_players) + " reinforcer entries, got " +
                      std::to_string(j.size()));
  }
  std::vector<ReinforcerPtr> out;
  for (int i = 0; i < n_players; ++i) {
    const json& r = j.size() == 1 ? j.at(0) : j.at(static_cast<std::size_t>(i));
    const std::string where = "reinforcers[" + std::to_string(j.size() == 1 ? 0 : i) + "]";
    const auto type = get_as<std::string>(require(r, "type", where.c_str()), where + ".type");
    if (type != "qtable") throw ConfigError(where + ": unknown reinforcer type '" + type + "'");
    QTableParams params;
    params.alpha = get_as<double>(require(r, "alpha", where.c_str()), where + ".alpha");
    params.gamma = get_as<double>(require(r, "gamma", where.c_str()), where + ".gamma");
    params.tau = get_as<double>(require(r, "tau", where.c_str()), where + ".tau");
    params.epsilon = get_as<double>(require(r, "epsilon", where.c_str()), where + ".epsilon");
    const int A = game.indexer().actions_of(i);
    const int S = game.num_states();
    const json x0 = r.value("x0", json(0.0));
    if (x0.is_number()) {
      out.push_back(std::make_shared<QTableReinforcer>(A, S, params, x0.get<double>()));
    } else {
      const auto table = get_as<std::vector<std::vector<double>>>(x0, where + ".x0");
      if (static_cast<int>(table.size()) != A) {
        throw StructuralError(where + ".x0 has " + std::to_string(table.size()) +
                              " action rows, expected " + std::to_string(A));
      }
      std::vector<double> flat;
      for (const auto& row : table) {
        if (static_cast<int>(row.size()) != S) {
          throw StructuralError(where + ".x0 rows must have " + std::to_string(S) + " entries");
        }
        flat.insert(flat.end(), row.begin(), row.end());
      }
      out.push_back(std::make_shared<QTableReinforcer>(A, S, params, std::move(flat)));
    }
  }
  return out;
}

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  cfg.document = j;

  json game_json;
  if (j.contains("game")) {
    game_json = j.at("game");
  } else if (j.contains("game_file")) {
    std::filesystem::path p = get_as<std::string>(j.at("game_file"), "game_file");
    if (p.is_relative()) p = base_dir / p;
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot open game file " + p.string());
    try {
      game_json = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("game file " + p.string() + ": " + e.what());
    }
    cfg.document["game"] = game_json;
    cfg.document.erase("game_file");
  }
  if (!game_json.is_null()) {
    cfg.game = std::make_shared<const MarkovGame>(parse_game(game_json));
    cfg.reinforcers = parse_reinforcers(require(j, "reinforcers", "config"), *cfg.game);
    for (std::size_t i = 0; i < cfg.reinforcers.size(); ++i) {
      const auto* q = dynamic_cast<const QTableReinforcer*>(cfg.reinforcers[i].get());
      if (q && q->params().epsilon == 0.0) {
        cfg.warnings.push_back("reinforcer " + std::to_string(i) +
                               " has epsilon = 0: the Doeblin condition is not guaranteed");
      }
    }
  }

  if (j.contains("matrix")) {
    const auto rows = get_as<std::vector<std::vector<double>>>(j.at("matrix"), "matrix");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (static_cast<Eigen::Index>(rows[r].size()) != n) {
        throw StructuralError("matrix must be square");
      }
      for (Eigen::Index c = 0; c < n; ++c) m(r, c) = rows[r][c];
    }
    cfg.matrix = std::move(m);
  }
  if (!cfg.game && !cfg.matrix) throw ConfigError("config needs a 'game', 'game_file' or 'matrix'");

  if (j.contains("run")) {
    const json& r = j.at("run");
    RunParams& run = cfg.run;
    if (r.contains("N")) run.scales = parse_scales(r.at("N"));
    if (r.contains("T")) run.horizon = get_as<double>(r.at("T"), "run.T");
    if (r.contains("reps")) run.reps = get_as<int>(r.at("reps"), "run.reps");
    if (r.contains("seed")) run.seed = get_as<std::uint64_t>(r.at("seed"), "run.seed");
    if (r.contains("stride")) run.stride = get_as<std::uint64_t>(r.at("stride"), "run.stride");
    if (r.contains("ode_method")) {
      run.ode_method = parse_ode_method(get_as<std::string>(r.at("ode_method"), "run.ode_method"));
    }
    if (r.contains("ode_steps")) run.ode_steps = get_as<long>(r.at("ode_steps"), "run.ode_steps");
    if (r.contains("jobs")) run.jobs = get_as<int>(r.at("jobs"), "run.jobs");
    if (r.contains("n_max")) run.n_max = get_as<int>(r.at("n_max"), "run.n_max");
    if (r.contains("doeblin_k") && !r.at("doeblin_k").is_null()) {
      run.doeblin_k = get_as<int>(r.at("doeblin_k"), "run.doeblin_k");
    }
    if (r.contains("probe_samples")) {
      run.probe_samples = get_as<int>(r.at("probe_samples"), "run.probe_samples");
    }
  }
  if (!(cfg.run.horizon > 0.0)) throw ConfigError("run.T must be positive");
  if (cfg.run.reps < 1) throw ConfigError("run.reps must be >= 1");
  if (cfg.run.ode_steps < 0) throw ConfigError("run.ode_steps must be >= 0");

  cfg.doeblin_check = j.value("doeblin_check", true);
  if (j.contains("output_dir")) cfg.output_dir = get_as<std::string>(j.at("output_dir"), "output_dir");
  if (j.contains("acceptance")) {
    const json& a = j.at("acceptance");
    if (a.contains("max_final_error")) {
      cfg.acceptance.max_final_error = get_as<double>(a.at("max_final_error"), "acceptance.max_final_error");
    }
    cfg.acceptance.monotone_decrease = a.value("monotone_decrease", false);
    if (a.contains("min_improvement_factor")) {
      cfg.acceptance.min_improvement_factor =
          get_as<double>(a.at("min_improvement_factor"), "acceptance.min_improvement_factor");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

std::shared_ptr<const WrappedGame> ExperimentConfig::wrapped() const {
  if (!game) throw ConfigError("config has no game");
  return std::make_shared<const WrappedGame>(game, reinforcers);
}

std::optional<double> ExperimentConfig::min_epsilon() const {
  std::optional<double> eps;
  for (const auto& r : reinforcers) {
    if (const auto* q = dynamic_cast<const QTableReinforcer*>(r.get())) {
      eps = eps ? std::min(*eps, q->params().epsilon) : q->params().epsilon;
    }
  }
  return eps;
}

}  // namespace mgfluid
