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

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgfluid/game.hpp"

namespace mgfluid {

// A learning agent (X0, f, pi). Implementations are immutable; the parameter
// vector lives outside the object and is passed in on every call.
class Reinforcer {
 public:
  virtual ~Reinforcer() = default;

  virtual std::string type() const = 0;
  virtual int num_actions() const = 0;
  virtual int num_states() const = 0;
  virtual int dimension() const = 0;
  virtual const std::vector<double>& initial_params() const = 0;

  // Writes the increment f(a, r, X, s, s') into `out` (size dimension()).
  // `actions` is the decoded joint action; `player` selects this agent's slot.
  virtual void update(std::span<const int> actions, int player, double reward,
                      std::span<const double> params, int s, int s_next,
                      std::span<double> out) const = 0;

  // Writes pi(X, s) into `out` (size num_actions()).
  virtual void policy(std::span<const double> params, int s, std::span<double> out) const = 0;

  // Sup-norm radius of a ball that provably contains every reachable
  // parameter vector, when one is known for this reinforcer.
  virtual std::optional<double> parameter_radius(double /*r_bar*/) const { return std::nullopt; }

  // Guaranteed lower bound on every action probability.
  virtual double probability_floor() const { return 0.0; }
};

using ReinforcerPtr = std::shared_ptr<const Reinforcer>;

struct QTableParams {
  double alpha = 0.1;
  double gamma = 0.9;
  double tau = 1.0;
  double epsilon = 0.1;
};

// Tabular Q-learner with a softmax policy mixed with uniform exploration.
// Parameters are laid out action-major: X[a * n_states + s].
class QTableReinforcer final : public Reinforcer {
 public:
  // Throws ParameterError for alpha outside [0, 1], gamma outside [0, 1),
  // tau <= 0, or epsilon outside [0, 1]; StructuralError if x0 has the wrong size.
  QTableReinforcer(int n_actions, int n_states, QTableParams params, std::vector<double> x0);
  QTableReinforcer(int n_actions, int n_states, QTableParams params, double fill);

  std::string type() const override { return "qtable"; }
  int num_actions() const override { return n_actions_; }
  int num_states() const override { return n_states_; }
  int dimension() const override { return n_actions_ * n_states_; }
  const std::vector<double>& initial_params() const override { return x0_; }
  const QTableParams& params() const { return params_; }

  void update(std::span<const int> actions, int player, double reward,
              std::span<const double> params, int s, int s_next,
              std::span<double> out) const override;
  void policy(std::span<const double> params, int s, std::span<double> out) const override;
  std::optional<double> parameter_radius(double r_bar) const override;
  double probability_floor() const override { return params_.epsilon / n_actions_; }

  // Copy with a different learning rate.
  QTableReinforcer with_alpha(double alpha) const;

 private:
  int n_actions_;
  int n_states_;
  QTableParams params_;
  std::vector<double> x0_;
};

// Q-learning increment. Zero everywhere except at (a_i, s), where it equals
// alpha * (r + gamma * max_b q[b][s_next] - q[a_i][s]).
std::vector<double> q_update(std::span<const double> q, int n_states, int s, int a_i, double r,
                             int s_next, double alpha, double gamma);

// (1 - eps) * softmax(q[.][s] / tau) + eps / A, evaluated with a max shift.
// Throws ParameterError when tau <= 0 or eps is outside [0, 1].
std::vector<double> softmax_policy(std::span<const double> q, int n_states, int s, double tau,
                                   double epsilon);
void softmax_policy_into(std::span<const double> q, int n_states, int s, double tau,
                         double epsilon, std::span<double> out);

// max(x0_norm, r_bar / (1 - gamma)). Throws ParameterError for gamma >= 1.
double param_ball_radius(double x0_norm, double r_bar, double gamma);

// Concatenated increments of every reinforcer for the wrapped state
// (s, a_joint, s_next), in player order. `out` has size sum of dimensions.
void aggregate_update(std::span<const ReinforcerPtr> reinforcers,
                      const JointActionIndexer& indexer, int s, int a_joint, int s_next,
                      std::span<const double> rewards, std::span<const double> x,
                      std::span<double> out);
std::vector<double> aggregate_update(std::span<const ReinforcerPtr> reinforcers,
                                     const JointActionIndexer& indexer, int s, int a_joint,
                                     int s_next, std::span<const double> rewards,
                                     std::span<const double> x);

}  // namespace mgfluid
