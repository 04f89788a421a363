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

#include "mgfluid/game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "mgfluid/errors.hpp"

namespace mgfluid {

namespace {

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

JointActionIndexer::JointActionIndexer(std::vector<int> action_counts)
    : counts_(std::move(action_counts)) {
  if (counts_.empty()) throw StructuralError("a game needs at least one player");
  strides_.assign(counts_.size(), 1);
  num_joint_ = 1;
  for (int p = static_cast<int>(counts_.size()) - 1; p >= 0; --p) {
    if (counts_[p] < 1) {
      throw StructuralError("player " + std::to_string(p) + " has no actions");
    }
    strides_[p] = num_joint_;
    num_joint_ *= counts_[p];
  }
}

int JointActionIndexer::encode(std::span<const int> actions) const {
  if (actions.size() != counts_.size()) {
    throw std::out_of_range("action tuple has " + std::to_string(actions.size()) +
                            " entries, expected " + std::to_string(counts_.size()));
  }
  int joint = 0;
  for (std::size_t p = 0; p < counts_.size(); ++p) {
    if (actions[p] < 0 || actions[p] >= counts_[p]) {
      throw std::out_of_range("action " + std::to_string(actions[p]) + " of player " +
                              std::to_string(p) + " outside [0, " +
                              std::to_string(counts_[p]) + ")");
    }
    joint += actions[p] * strides_[p];
  }
  return joint;
}

std::vector<int> JointActionIndexer::decode(int joint) const {
  std::vector<int> out(counts_.size());
  decode_into(joint, out);
  return out;
}

void JointActionIndexer::decode_into(int joint, std::span<int> out) const {
  if (joint < 0 || joint >= num_joint_) {
    throw std::out_of_range("joint action index " + std::to_string(joint) + " outside [0, " +
                            std::to_string(num_joint_) + ")");
  }
  for (std::size_t p = 0; p < counts_.size(); ++p) {
    out[p] = (joint / strides_[p]) % counts_[p];
  }
}

MarkovGame::MarkovGame(int n_states, std::vector<int> n_actions, std::vector<double> transition,
                       std::vector<std::vector<double>> rewards, std::vector<double> initial_law)
    : n_states_(n_states),
      indexer_(std::move(n_actions)),
      transition_(std::move(transition)),
      rewards_(std::move(rewards)),
      initial_law_(std::move(initial_law)) {
  if (n_states_ < 1) throw StructuralError("n_states must be positive");
  const std::size_t sa = static_cast<std::size_t>(n_states_) * indexer_.num_joint();
  if (transition_.size() != sa * n_states_) {
    throw StructuralError("transition tensor has " + std::to_string(transition_.size()) +
                          " entries, expected S*|A|*S = " + std::to_string(sa * n_states_));
  }
  if (rewards_.size() != static_cast<std::size_t>(indexer_.num_players())) {
    throw StructuralError("expected one reward tensor per player (" +
                          std::to_string(indexer_.num_players()) + "), got " +
                          std::to_string(rewards_.size()));
  }
  for (std::size_t p = 0; p < rewards_.size(); ++p) {
    if (rewards_[p].size() != sa) {
      throw StructuralError("reward tensor of player " + std::to_string(p) + " has " +
                            std::to_string(rewards_[p].size()) + " entries, expected S*|A| = " +
                            std::to_string(sa));
    }
  }
  if (initial_law_.size() != static_cast<std::size_t>(n_states_)) {
    throw StructuralError("initial law has " + std::to_string(initial_law_.size()) +
                          " entries, expected " + std::to_string(n_states_));
  }
}

double MarkovGame::min_positive_transition() const {
  double kappa = 0.0;
  for (double p : transition_) {
    if (p > 0.0 && (kappa == 0.0 || p < kappa)) kappa = p;
  }
  return kappa;
}

ValidationReport validate_game(const MarkovGame& game) {
  ValidationReport report;
  const int S = game.num_states();
  const int A = game.num_joint_actions();
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      double sum = 0.0;
      for (int sn = 0; sn < S; ++sn) {
        const double p = game.transition(s, a, sn);
        if (!(p >= 0.0)) {
          report.violations.push_back(
              {"negative_probability", "negative probability " + fmt_num(p) + " at (s=" +
                                           std::to_string(s) + ", a=" + std::to_string(a) +
                                           ", s'=" + std::to_string(sn) + ")"});
        }
        sum += p;
      }
      if (!(std::abs(sum - 1.0) <= kStochasticTolerance)) {
        report.violations.push_back({"row_sum", "row sum " + fmt_num(sum) + " at (s=" +
                                                    std::to_string(s) + ", a=" +
                                                    std::to_string(a) + ")"});
      }
    }
  }
  double init_sum = 0.0;
  for (int s = 0; s < S; ++s) {
    const double p = game.initial_prob(s);
    if (!(p >= 0.0)) {
      report.violations.push_back({"negative_probability", "negative probability " + fmt_num(p) +
                                                               " in initial law at s=" +
                                                               std::to_string(s)});
    }
    init_sum += p;
  }
  if (!(std::abs(init_sum - 1.0) <= kStochasticTolerance)) {
    report.violations.push_back(
        {"initial_law_sum", "initial law sums to " + fmt_num(init_sum)});
  }
  for (int i = 0; i < game.num_players(); ++i) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        if (!std::isfinite(game.reward(i, s, a))) {
          report.violations.push_back({"non_finite_reward",
                                       "non-finite reward for player " + std::to_string(i) +
                                           " at (s=" + std::to_string(s) +
                                           ", a=" + std::to_string(a) + ")"});
        }
      }
    }
  }
  return report;
}

MarkovGame renormalized(const MarkovGame& game, double tolerance) {
  std::vector<double> transition = game.transition_tensor();
  const std::size_t S = static_cast<std::size_t>(game.num_states());
  for (std::size_t row = 0; row * S < transition.size(); ++row) {
    auto first = transition.begin() + static_cast<std::ptrdiff_t>(row * S);
    auto last = first + static_cast<std::ptrdiff_t>(S);
    if (std::any_of(first, last, [](double p) { return p < 0.0; })) continue;
    double sum = 0.0;
    for (auto it = first; it != last; ++it) sum += *it;
    if (sum > 0.0 && std::abs(sum - 1.0) <= tolerance) {
      for (auto it = first; it != last; ++it) *it /= sum;
    }
  }
  std::vector<double> init = game.initial_law();
  double sum = 0.0;
  for (double p : init) sum += p;
  const bool init_nonneg = std::all_of(init.begin(), init.end(), [](double p) { return p >= 0.0; });
  if (init_nonneg && sum > 0.0 && std::abs(sum - 1.0) <= tolerance) {
    for (double& p : init) p /= sum;
  }
  return MarkovGame(game.num_states(), game.indexer().action_counts(), std::move(transition),
                    game.reward_tensors(), std::move(init));
}

double max_abs_reward(const MarkovGame& game) {
  double r_bar = 0.0;
  for (const auto& tensor : game.reward_tensors()) {
    for (double r : tensor) r_bar = std::max(r_bar, std::abs(r));
  }
  return r_bar;
}

}  // namespace mgfluid
