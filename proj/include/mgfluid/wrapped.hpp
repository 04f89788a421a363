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
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mgfluid/distribution.hpp"
#include "mgfluid/game.hpp"
#include "mgfluid/reinforcer.hpp"

namespace mgfluid {

// Aggregated parameters of all reinforcers, player-major.
using ParamPoint = std::vector<double>;

// Update scale N. Either a positive integer or the limit N = infinity, where
// the policy is evaluated at x with no increment.
class Scale {
 public:
  // Throws ParameterError for n < 1.
  static Scale finite(std::int64_t n);
  static Scale infinite() { return Scale(0); }

  bool is_infinite() const { return n_ == 0; }
  std::int64_t value() const { return n_; }
  // 1/N, or 0 for the limit.
  double inverse() const { return n_ == 0 ? 0.0 : 1.0 / static_cast<double>(n_); }
  // v / N, or 0 for the limit.
  double scale_down(double v) const { return n_ == 0 ? 0.0 : v / static_cast<double>(n_); }
  std::string to_string() const { return is_infinite() ? "inf" : std::to_string(n_); }

  bool operator==(const Scale&) const = default;

 private:
  explicit Scale(std::int64_t n) : n_(n) {}
  std::int64_t n_;
};

// One wrapped state (current state, joint action, next state).
struct WrappedTriple {
  int s_current = 0;
  int action = 0;
  int s_next = 0;
  bool operator==(const WrappedTriple&) const = default;
};

// Wrapped Markov game over E = S x A x S, enumerated lexicographically with
// s_current most significant, then the joint action, then s_next:
//   g = (s_current * |A| + action) * S + s_next.
// Immutable after construction and safe to share across threads.
class WrappedGame {
 public:
  // Scratch buffers for allocation-free kernel rows. One per thread.
  struct Workspace {
    std::vector<double> shifted;      // x + f(x, g) / N
    std::vector<double> increment;    // f(x, g)
    std::vector<double> player_probs; // concatenated per-player policies
    std::vector<double> joint_probs;  // |A|
  };

  // Throws StructuralError when the reinforcers do not match the game.
  WrappedGame(std::shared_ptr<const MarkovGame> game, std::vector<ReinforcerPtr> reinforcers);

  const MarkovGame& game() const { return *game_; }
  std::shared_ptr<const MarkovGame> game_ptr() const { return game_; }
  const std::vector<ReinforcerPtr>& reinforcers() const { return reinforcers_; }

  std::size_t size() const { return size_; }
  int num_states() const { return game_->num_states(); }
  int num_joint_actions() const { return game_->num_joint_actions(); }
  int num_players() const { return game_->num_players(); }
  // d = sum of reinforcer dimensions.
  int dimension() const { return dimension_; }
  std::size_t param_offset(int player) const { return offsets_[player]; }

  std::size_t encode(const WrappedTriple& t) const;
  WrappedTriple decode(std::size_t g) const;
  std::span<const int> actions_of(int joint) const {
    return {decoded_.data() + static_cast<std::size_t>(joint) * num_players(),
            static_cast<std::size_t>(num_players())};
  }

  ParamPoint initial_params() const;
  // Sup-norm radius of the ball known to contain every reachable parameter
  // vector: max(|X0|_inf, max_i r_bar / (1 - gamma_i)) for Q-tables. Zero
  // radius is returned only when no reinforcer reports a bound and X0 = 0.
  double parameter_radius() const;
  bool has_parameter_radius() const;
  // Smallest guaranteed joint-action probability (product of player floors).
  double joint_probability_floor() const;

  double reward(int player, std::size_t g) const;

  Workspace make_workspace() const;

  // Unscaled aggregate increment f(x, g).
  void increment(std::span<const double> x, std::size_t g, std::span<double> out) const;
  ParamPoint increment(std::span<const double> x, std::size_t g) const;

  // Product policy pi(x, s) over joint actions.
  void joint_policy(std::span<const double> x, int s, std::span<double> out,
                    Workspace& ws) const;
  std::vector<double> joint_policy(std::span<const double> x, int s) const;

  // Nonzero part of row g of P^N_x. Successors all have s_current equal to
  // the s_next of g, so they form the contiguous index block
  // [block_begin(g), block_begin(g) + |A| * S). Writes |A| * S entries.
  std::size_t block_begin(std::size_t g) const {
    return static_cast<std::size_t>(decode(g).s_next) * block_size();
  }
  std::size_t block_size() const {
    return static_cast<std::size_t>(num_joint_actions()) * num_states();
  }
  void transition_block(std::span<const double> x, std::size_t g, Scale scale,
                        std::span<double> out, Workspace& ws) const;

 private:
  // Fills the block for a successor state given the parameters in force.
  void fill_block(std::span<const double> params, int s, std::span<double> out,
                  Workspace& ws) const;

  std::shared_ptr<const MarkovGame> game_;
  std::vector<ReinforcerPtr> reinforcers_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> policy_offsets_;
  std::vector<int> decoded_;
  int dimension_ = 0;
  std::size_t size_ = 0;
  double r_bar_ = 0.0;
};

// Validates dimensions and finiteness of a parameter point.
void check_param_point(const WrappedGame& w, std::span<const double> x);

// Row-stochastic |E| x |E| matrix P^N_x (P_x for the infinite scale).
Eigen::MatrixXd transition_matrix(const WrappedGame& w, std::span<const double> x, Scale scale);

// mu0(s_c, a, s_n) = nu0(s_c) * pi(x0, s_c)(a) * T(s_c, a)(s_n).
Distribution initial_wrapped_distribution(const WrappedGame& w, std::span<const double> x0);

struct RewardAndIncrement {
  std::vector<double> rewards;
  ParamPoint increment;  // f(x, g) / N
};

// Rewards R^i(s_c, a) at g and the scaled increment; zero for the infinite scale.
RewardAndIncrement wrapped_reward_and_increment(const WrappedGame& w, std::size_t g,
                                                std::span<const double> x, Scale scale);

// Human-readable label "(s_c;a;s_n)" used in CSV headers.
std::string triple_label(const WrappedGame& w, std::size_t g);

}  // namespace mgfluid
