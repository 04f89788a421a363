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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mgfluid {

// Bijection between per-player action tuples and an index into the joint
// action space. Player 0 is the most significant digit.
class JointActionIndexer {
 public:
  JointActionIndexer() = default;
  explicit JointActionIndexer(std::vector<int> action_counts);

  int num_players() const { return static_cast<int>(counts_.size()); }
  int num_joint() const { return num_joint_; }
  int actions_of(int player) const { return counts_[player]; }
  const std::vector<int>& action_counts() const { return counts_; }

  // Throws std::out_of_range when an action exceeds its player's range.
  int encode(std::span<const int> actions) const;
  std::vector<int> decode(int joint) const;
  // Allocation-free variant; `out` must have num_players() entries.
  void decode_into(int joint, std::span<int> out) const;
  // Action of a single player inside a joint index.
  int action_of(int joint, int player) const {
    return (joint / strides_[player]) % counts_[player];
  }

 private:
  std::vector<int> counts_;
  std::vector<int> strides_;
  int num_joint_ = 1;
};

// Tabular finite Markov game. Immutable once constructed.
//
// transition is stored flat in [s][a_joint][s'] order and rewards per player
// in [s][a_joint] order. States and actions are 0-indexed.
class MarkovGame {
 public:
  // Throws StructuralError when a tensor size disagrees with the counts.
  // Probabilistic constraints are not enforced here; see validate_game.
  MarkovGame(int n_states, std::vector<int> n_actions,
             std::vector<double> transition,
             std::vector<std::vector<double>> rewards,
             std::vector<double> initial_law);

  int num_players() const { return indexer_.num_players(); }
  int num_states() const { return n_states_; }
  int num_joint_actions() const { return indexer_.num_joint(); }
  const JointActionIndexer& indexer() const { return indexer_; }

  double transition(int s, int a, int s_next) const {
    return transition_[(static_cast<std::size_t>(s) * num_joint_actions() + a) * n_states_ +
                       s_next];
  }
  std::span<const double> transition_row(int s, int a) const {
    return {transition_.data() + (static_cast<std::size_t>(s) * num_joint_actions() + a) * n_states_,
            static_cast<std::size_t>(n_states_)};
  }
  double reward(int player, int s, int a) const {
    return rewards_[player][static_cast<std::size_t>(s) * num_joint_actions() + a];
  }
  double initial_prob(int s) const { return initial_law_[s]; }

  const std::vector<double>& transition_tensor() const { return transition_; }
  const std::vector<std::vector<double>>& reward_tensors() const { return rewards_; }
  const std::vector<double>& initial_law() const { return initial_law_; }

  // Smallest strictly positive transition probability (the kappa of the
  // two-step minorization floor). Zero if every entry is zero.
  double min_positive_transition() const;

 private:
  int n_states_;
  JointActionIndexer indexer_;
  std::vector<double> transition_;
  std::vector<std::vector<double>> rewards_;
  std::vector<double> initial_law_;
};

inline constexpr double kStochasticTolerance = 1e-12;

struct Violation {
  std::string kind;  // "row_sum", "negative_probability", "initial_law_sum", "non_finite_reward"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Empty report iff every transition row and the initial law are probability
// vectors within kStochasticTolerance and every reward is finite.
ValidationReport validate_game(const MarkovGame& game);

// Rows (and initial law) whose sums lie within `tolerance` of 1 are rescaled
// to sum to 1; rows outside the tolerance are left untouched.
MarkovGame renormalized(const MarkovGame& game, double tolerance = kStochasticTolerance);

// max over players, states and joint actions of |R^i(s, a)|.
double max_abs_reward(const MarkovGame& game);

}  // namespace mgfluid
