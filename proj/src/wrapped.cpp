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

#include "mgfluid/wrapped.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mgfluid/errors.hpp"

namespace mgfluid {

Scale Scale::finite(std::int64_t n) {
  if (n < 1) throw ParameterError("scale N must be >= 1, got " + std::to_string(n));
  return Scale(n);
}

WrappedGame::WrappedGame(std::shared_ptr<const MarkovGame> game,
                         std::vector<ReinforcerPtr> reinforcers)
    : game_(std::move(game)), reinforcers_(std::move(reinforcers)) {
  if (!game_) throw StructuralError("wrapped game needs a Markov game");
  const int n_players = game_->num_players();
  if (static_cast<int>(reinforcers_.size()) != n_players) {
    throw StructuralError("expected " + std::to_string(n_players) + " reinforcers, got " +
                          std::to_string(reinforcers_.size()));
  }
  std::size_t offset = 0;
  std::size_t policy_offset = 0;
  for (int i = 0; i < n_players; ++i) {
    const auto& r = reinforcers_[i];
    if (!r) throw StructuralError("reinforcer " + std::to_string(i) + " is null");
    if (r->num_actions() != game_->indexer().actions_of(i)) {
      throw StructuralError("reinforcer " + std::to_string(i) + " has " +
                            std::to_string(r->num_actions()) + " actions, game has " +
                            std::to_string(game_->indexer().actions_of(i)));
    }
    if (r->num_states() != game_->num_states()) {
      throw StructuralError("reinforcer " + std::to_string(i) + " expects " +
                            std::to_string(r->num_states()) + " states, game has " +
                            std::to_string(game_->num_states()));
    }
    if (r->initial_params().size() != static_cast<std::size_t>(r->dimension())) {
      throw StructuralError("reinforcer " + std::to_string(i) +
                            " initial parameters do not match its dimension");
    }
    offsets_.push_back(offset);
    policy_offsets_.push_back(policy_offset);
    offset += static_cast<std::size_t>(r->dimension());
    policy_offset += static_cast<std::size_t>(r->num_actions());
  }
  offsets_.push_back(offset);
  policy_offsets_.push_back(policy_offset);
  dimension_ = static_cast<int>(offset);

  const int A = game_->num_joint_actions();
  decoded_.resize(static_cast<std::size_t>(A) * n_players);
  for (int a = 0; a < A; ++a) {
    game_->indexer().decode_into(
        a, std::span<int>(decoded_.data() + static_cast<std::size_t>(a) * n_players, n_players));
  }
  const auto S = static_cast<std::size_t>(game_->num_states());
  size_ = S * static_cast<std::size_t>(A) * S;
  r_bar_ = max_abs_reward(*game_);
}

std::size_t WrappedGame::encode(const WrappedTriple& t) const {
  const int S = num_states();
  const int A = num_joint_actions();
  if (t.s_current < 0 || t.s_current >= S || t.s_next < 0 || t.s_next >= S || t.action < 0 ||
      t.action >= A) {
    throw std::out_of_range("wrapped triple outside the state/action ranges");
  }
  return (static_cast<std::size_t>(t.s_current) * A + t.action) * S + t.s_next;
}

WrappedTriple WrappedGame::decode(std::size_t g) const {
  if (g >= size_) {
    throw std::out_of_range("wrapped index " + std::to_string(g) + " outside [0, " +
                            std::to_string(size_) + ")");
  }
  const auto S = static_cast<std::size_t>(num_states());
  const auto A = static_cast<std::size_t>(num_joint_actions());
  WrappedTriple t;
  t.s_next = static_cast<int>(g % S);
  t.action = static_cast<int>((g / S) % A);
  t.s_current = static_cast<int>(g / (S * A));
  return t;
}

ParamPoint WrappedGame::initial_params() const {
  ParamPoint x;
  x.reserve(static_cast<std::size_t>(dimension_));
  for (const auto& r : reinforcers_) {
    x.insert(x.end(), r->initial_params().begin(), r->initial_params().end());
  }
  return x;
}

bool WrappedGame::has_parameter_radius() const {
  return std::all_of(reinforcers_.begin(), reinforcers_.end(),
                     [&](const ReinforcerPtr& r) { return r->parameter_radius(r_bar_).has_value(); });
}

double WrappedGame::parameter_radius() const {
  double radius = 0.0;
  for (double v : initial_params()) radius = std::max(radius, std::abs(v));
  for (const auto& r : reinforcers_) {
    if (auto rr = r->parameter_radius(r_bar_)) radius = std::max(radius, *rr);
  }
  return radius;
}

double WrappedGame::joint_probability_floor() const {
  double floor = 1.0;
  for (const auto& r : reinforcers_) floor *= r->probability_floor();
  return floor;
}

double WrappedGame::reward(int player, std::size_t g) const {
  const WrappedTriple t = decode(g);
  return game_->reward(player, t.s_current, t.action);
}

WrappedGame::Workspace WrappedGame::make_workspace() const {
  Workspace ws;
  ws.shifted.resize(static_cast<std::size_t>(dimension_));
  ws.increment.resize(static_cast<std::size_t>(dimension_));
  ws.player_probs.resize(policy_offsets_.back());
  ws.joint_probs.resize(static_cast<std::size_t>(num_joint_actions()));
  return ws;
}

void WrappedGame::increment(std::span<const double> x, std::size_t g,
                            std::span<double> out) const {
  const WrappedTriple t = decode(g);
  const auto actions = actions_of(t.action);
  for (int i = 0; i < num_players(); ++i) {
    const std::size_t lo = offsets_[i];
    const std::size_t d = offsets_[i + 1] - lo;
    reinforcers_[i]->update(actions, i, game_->reward(i, t.s_current, t.action), x.subspan(lo, d),
                            t.s_current, t.s_next, out.subspan(lo, d));
  }
}

ParamPoint WrappedGame::increment(std::span<const double> x, std::size_t g) const {
  check_param_point(*this, x);
  ParamPoint out(static_cast<std::size_t>(dimension_), 0.0);
  increment(x, g, out);
  return out;
}

void WrappedGame::joint_policy(std::span<const double> x, int s, std::span<double> out,
                               Workspace& ws) const {
  const int n_players = num_players();
  for (int i = 0; i < n_players; ++i) {
    const std::size_t lo = offsets_[i];
    const std::size_t d = offsets_[i + 1] - lo;
    const std::size_t plo = policy_offsets_[i];
    const std::size_t na = policy_offsets_[i + 1] - plo;
    reinforcers_[i]->policy(x.subspan(lo, d), s,
                            std::span<double>(ws.player_probs.data() + plo, na));
  }
  const int A = num_joint_actions();
  for (int a = 0; a < A; ++a) {
    const auto actions = actions_of(a);
    double p = 1.0;
    for (int i = 0; i < n_players; ++i) p *= ws.player_probs[policy_offsets_[i] + actions[i]];
    out[a] = p;
  }
}

std::vector<double> WrappedGame::joint_policy(std::span<const double> x, int s) const {
  check_param_point(*this, x);
  if (s < 0 || s >= num_states()) throw std::out_of_range("state outside range");
  Workspace ws = make_workspace();
  std::vector<double> out(static_cast<std::size_t>(num_joint_actions()));
  joint_policy(x, s, out, ws);
  return out;
}

void WrappedGame::fill_block(std::span<const double> params, int s, std::span<double> out,
                             Workspace& ws) const {
  joint_policy(params, s, ws.joint_probs, ws);
  const int S = num_states();
  const int A = num_joint_actions();
  for (int a = 0; a < A; ++a) {
    const double pa = ws.joint_probs[a];
    const auto row = game_->transition_row(s, a);
    for (int sn = 0; sn < S; ++sn) out[static_cast<std::size_t>(a) * S + sn] = pa * row[sn];
  }
}

void WrappedGame::transition_block(std::span<const double> x, std::size_t g, Scale scale,
                                   std::span<double> out, Workspace& ws) const {
  const int s = decode(g).s_next;
  if (scale.is_infinite()) {
    fill_block(x, s, out, ws);
    return;
  }
  increment(x, g, ws.increment);
  for (std::size_t k = 0; k < ws.shifted.size(); ++k) {
    ws.shifted[k] = x[k] + scale.scale_down(ws.increment[k]);
  }
  fill_block(ws.shifted, s, out, ws);
}

void check_param_point(const WrappedGame& w, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(w.dimension())) {
    throw StructuralError("parameter point has " + std::to_string(x.size()) +
                          " entries, expected " + std::to_string(w.dimension()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw ParameterError("parameter point has a non-finite entry");
  }
}

Eigen::MatrixXd transition_matrix(const WrappedGame& w, std::span<const double> x, Scale scale) {
  check_param_point(w, x);
  const auto E = static_cast<Eigen::Index>(w.size());
  const std::size_t B = w.block_size();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(E, E);
  auto ws = w.make_workspace();
  std::vector<double> block(B);
  for (std::size_t g = 0; g < w.size(); ++g) {
    w.transition_block(x, g, scale, block, ws);
    const std::size_t lo = w.block_begin(g);
    for (std::size_t k = 0; k < B; ++k) {
      P(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(lo + k)) = block[k];
    }
  }
  return P;
}

Distribution initial_wrapped_distribution(const WrappedGame& w, std::span<const double> x0) {
  check_param_point(w, x0);
  const MarkovGame& game = w.game();
  const int S = w.num_states();
  const int A = w.num_joint_actions();
  std::vector<double> mu(w.size(), 0.0);
  auto ws = w.make_workspace();
  std::vector<double> pi(static_cast<std::size_t>(A));
  for (int s = 0; s < S; ++s) {
    w.joint_policy(x0, s, pi, ws);
    for (int a = 0; a < A; ++a) {
      for (int sn = 0; sn < S; ++sn) {
        mu[w.encode({s, a, sn})] = game.initial_prob(s) * pi[a] * game.transition(s, a, sn);
      }
    }
  }
  return Distribution(std::move(mu));
}

RewardAndIncrement wrapped_reward_and_increment(const WrappedGame& w, std::size_t g,
                                                std::span<const double> x, Scale scale) {
  RewardAndIncrement out;
  const WrappedTriple t = w.decode(g);
  for (int i = 0; i < w.num_players(); ++i) {
    out.rewards.push_back(w.game().reward(i, t.s_current, t.action));
  }
  out.increment = w.increment(x, g);
  for (double& v : out.increment) v = scale.scale_down(v);
  return out;
}

std::string triple_label(const WrappedGame& w, std::size_t g) {
  const WrappedTriple t = w.decode(g);
  return "(" + std::to_string(t.s_current) + ";" + std::to_string(t.action) + ";" +
         std::to_string(t.s_next) + ")";
}

}  // namespace mgfluid
