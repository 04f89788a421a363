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

#include "mgfluid/reinforcer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mgfluid/errors.hpp"

namespace mgfluid {

namespace {

void check_q_params(const QTableParams& p) {
  if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) {
    throw ParameterError("alpha must lie in [0, 1], got " + std::to_string(p.alpha));
  }
  if (!(p.gamma >= 0.0 && p.gamma < 1.0)) {
    throw ParameterError("gamma must lie in [0, 1), got " + std::to_string(p.gamma));
  }
  if (!(p.tau > 0.0)) throw ParameterError("tau must be positive, got " + std::to_string(p.tau));
  if (!(p.epsilon >= 0.0 && p.epsilon <= 1.0)) {
    throw ParameterError("epsilon must lie in [0, 1], got " + std::to_string(p.epsilon));
  }
}

void check_index(int v, int n, const char* what) {
  if (v < 0 || v >= n) {
    throw std::out_of_range(std::string(what) + " " + std::to_string(v) + " outside [0, " +
                            std::to_string(n) + ")");
  }
}

}  // namespace

QTableReinforcer::QTableReinforcer(int n_actions, int n_states, QTableParams params,
                                   std::vector<double> x0)
    : n_actions_(n_actions), n_states_(n_states), params_(params), x0_(std::move(x0)) {
  if (n_actions_ < 1 || n_states_ < 1) {
    throw StructuralError("Q-table needs at least one action and one state");
  }
  check_q_params(params_);
  if (x0_.size() != static_cast<std::size_t>(n_actions_) * n_states_) {
    throw StructuralError("Q-table initial values have " + std::to_string(x0_.size()) +
                          " entries, expected A*S = " + std::to_string(n_actions_ * n_states_));
  }
  for (double v : x0_) {
    if (!std::isfinite(v)) throw ParameterError("Q-table initial values must be finite");
  }
}

QTableReinforcer::QTableReinforcer(int n_actions, int n_states, QTableParams params, double fill)
    : QTableReinforcer(n_actions, n_states, params,
                       std::vector<double>(static_cast<std::size_t>(std::max(n_actions, 0)) *
                                               std::max(n_states, 0),
                                           fill)) {}

void QTableReinforcer::update(std::span<const int> actions, int player, double reward,
                              std::span<const double> params, int s, int s_next,
                              std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const int a = actions[player];
  double best = params[s_next];
  for (int b = 1; b < n_actions_; ++b) best = std::max(best, params[b * n_states_ + s_next]);
  const std::size_t k = static_cast<std::size_t>(a) * n_states_ + s;
  out[k] = params_.alpha * (reward + params_.gamma * best - params[k]);
}

void QTableReinforcer::policy(std::span<const double> params, int s,
                              std::span<double> out) const {
  softmax_policy_into(params, n_states_, s, params_.tau, params_.epsilon, out);
}

std::optional<double> QTableReinforcer::parameter_radius(double r_bar) const {
  double x0_norm = 0.0;
  for (double v : x0_) x0_norm = std::max(x0_norm, std::abs(v));
  return param_ball_radius(x0_norm, r_bar, params_.gamma);
}

QTableReinforcer QTableReinforcer::with_alpha(double alpha) const {
  QTableParams p = params_;
  p.alpha = alpha;
  return QTableReinforcer(n_actions_, n_states_, p, x0_);
}

std::vector<double> q_update(std::span<const double> q, int n_states, int s, int a_i, double r,
                             int s_next, double alpha, double gamma) {
  if (n_states < 1 || q.size() % static_cast<std::size_t>(n_states) != 0) {
    throw StructuralError("Q-table size is not a multiple of n_states");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw ParameterError("gamma must lie in [0, 1), got " + std::to_string(gamma));
  }
  const int n_actions = static_cast<int>(q.size() / n_states);
  check_index(s, n_states, "state");
  check_index(s_next, n_states, "next state");
  check_index(a_i, n_actions, "action");
  std::vector<double> inc(q.size(), 0.0);
  double best = q[s_next];
  for (int b = 1; b < n_actions; ++b) best = std::max(best, q[b * n_states + s_next]);
  const std::size_t k = static_cast<std::size_t>(a_i) * n_states + s;
  inc[k] = alpha * (r + gamma * best - q[k]);
  return inc;
}

void softmax_policy_into(std::span<const double> q, int n_states, int s, double tau,
                         double epsilon, std::span<double> out) {
  if (!(tau > 0.0)) throw ParameterError("softmax temperature must be positive");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ParameterError("exploration rate must lie in [0, 1]");
  }
  const int n_actions = static_cast<int>(out.size());
  double top = q[s];
  for (int a = 1; a < n_actions; ++a) top = std::max(top, q[a * n_states + s]);
  double z = 0.0;
  for (int a = 0; a < n_actions; ++a) {
    out[a] = std::exp((q[a * n_states + s] - top) / tau);
    z += out[a];
  }
  const double floor = epsilon / n_actions;
  for (int a = 0; a < n_actions; ++a) out[a] = (1.0 - epsilon) * (out[a] / z) + floor;
}

std::vector<double> softmax_policy(std::span<const double> q, int n_states, int s, double tau,
                                   double epsilon) {
  if (n_states < 1 || q.size() % static_cast<std::size_t>(n_states) != 0) {
    throw StructuralError("Q-table size is not a multiple of n_states");
  }
  const int n_actions = static_cast<int>(q.size() / n_states);
  check_index(s, n_states, "state");
  std::vector<double> out(n_actions);
  softmax_policy_into(q, n_states, s, tau, epsilon, out);
  return out;
}

double param_ball_radius(double x0_norm, double r_bar, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw ParameterError("gamma must lie in [0, 1), got " + std::to_string(gamma));
  }
  return std::max(x0_norm, r_bar / (1.0 - gamma));
}

void aggregate_update(std::span<const ReinforcerPtr> reinforcers,
                      const JointActionIndexer& indexer, int s, int a_joint, int s_next,
                      std::span<const double> rewards, std::span<const double> x,
                      std::span<double> out) {
  std::vector<int> actions = indexer.decode(a_joint);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < reinforcers.size(); ++i) {
    const auto d = static_cast<std::size_t>(reinforcers[i]->dimension());
    reinforcers[i]->update(actions, static_cast<int>(i), rewards[i], x.subspan(offset, d), s,
                           s_next, out.subspan(offset, d));
    offset += d;
  }
}

std::vector<double> aggregate_update(std::span<const ReinforcerPtr> reinforcers,
                                     const JointActionIndexer& indexer, int s, int a_joint,
                                     int s_next, std::span<const double> rewards,
                                     std::span<const double> x) {
  std::size_t d = 0;
  for (const auto& r : reinforcers) d += static_cast<std::size_t>(r->dimension());
  if (x.size() != d) {
    throw StructuralError("parameter vector has " + std::to_string(x.size()) +
                          " entries, expected " + std::to_string(d));
  }
  if (rewards.size() != reinforcers.size()) {
    throw StructuralError("expected one reward per reinforcer");
  }
  std::vector<double> out(d, 0.0);
  aggregate_update(reinforcers, indexer, s, a_joint, s_next, rewards, x, out);
  return out;
}

}  // namespace mgfluid
