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

#include "mgfluid/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "mgfluid/errors.hpp"
#include "mgfluid/ode.hpp"
#include "mgfluid/rng.hpp"

namespace mgfluid {

std::size_t inverse_cdf(std::span<const double> probs, double xi) {
  double cum = 0.0;
  std::size_t last_positive = probs.size();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!(p > 0.0)) continue;
    cum += p;
    last_positive = i;
    if (xi <= cum) return i;
  }
  if (last_positive == probs.size()) {
    throw ParameterError("inverse CDF over a vector without positive mass");
  }
  return last_positive;
}

std::size_t sample_step(const WrappedGame& w, std::span<const double> x, std::size_t g,
                        Scale scale, double xi) {
  check_param_point(w, x);
  if (!(xi >= 0.0 && xi <= 1.0)) throw ParameterError("uniform draw outside [0, 1]");
  auto ws = w.make_workspace();
  std::vector<double> block(w.block_size());
  w.transition_block(x, g, scale, block, ws);
  return w.block_begin(g) + inverse_cdf(block, xi);
}

FrozenSampler::FrozenSampler(const WrappedGame& w, std::span<const double> x, Scale scale)
    : block_size_(w.block_size()), begin_(w.size()), rows_(w.size() * w.block_size()) {
  check_param_point(w, x);
  auto ws = w.make_workspace();
  for (std::size_t g = 0; g < w.size(); ++g) {
    begin_[g] = w.block_begin(g);
    w.transition_block(x, g, scale, std::span<double>(rows_.data() + g * block_size_, block_size_),
                       ws);
  }
}

std::size_t FrozenSampler::step(std::size_t g, double xi) const {
  return begin_[g] +
         inverse_cdf(std::span<const double>(rows_.data() + g * block_size_, block_size_), xi);
}

std::uint64_t step_count(std::int64_t n, double horizon) {
  if (n < 1) throw ParameterError("scale N must be >= 1");
  if (!(horizon > 0.0)) throw ParameterError("horizon must be positive");
  const double product = static_cast<double>(n) * horizon;
  const double nearest = std::round(product);
  if (std::abs(product - nearest) <= 1e-9 * std::max(1.0, nearest)) {
    return static_cast<std::uint64_t>(nearest);
  }
  return static_cast<std::uint64_t>(std::floor(product));
}

std::uint64_t default_stride(std::int64_t n) {
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(n / 100));
}

TrajectoryRecord sample_trajectory(const WrappedGame& w, std::span<const double> x0, Scale scale,
                                   double horizon, std::uint64_t seed, std::uint64_t stride,
                                   const StepObserver& observer) {
  if (scale.is_infinite()) throw ParameterError("trajectories need a finite scale N");
  check_param_point(w, x0);
  TrajectoryRecord rec;
  rec.scale = scale.value();
  rec.horizon = horizon;
  rec.seed = seed;
  rec.steps = step_count(scale.value(), horizon);
  rec.stride = stride == 0 ? default_stride(scale.value()) : stride;
  rec.rng_id = RngStream::kAlgorithm;
  rec.cumulative_reward.assign(static_cast<std::size_t>(w.num_players()), 0.0);

  RngStream rng(seed);
  const Distribution mu0 = initial_wrapped_distribution(w, x0);
  std::size_t g = inverse_cdf(mu0.probs(), rng.next_uniform());

  auto ws = w.make_workspace();
  std::vector<double> block(w.block_size());
  ParamPoint x(x0.begin(), x0.end());
  const MarkovGame& game = w.game();

  for (std::uint64_t n = 0; n < rec.steps; ++n) {
    if (observer) observer(n, g, x);
    if (n % rec.stride == 0) rec.snapshots.push_back({n, g, x});
    const WrappedTriple t = w.decode(g);
    for (int i = 0; i < w.num_players(); ++i) {
      rec.cumulative_reward[i] += game.reward(i, t.s_current, t.action);
    }
    // Fills ws.shifted with X_n + f(X_n, G_n) / N and the successor row.
    w.transition_block(x, g, scale, block, ws);
    const std::size_t next = w.block_begin(g) + inverse_cdf(block, rng.next_uniform());
    x.swap(ws.shifted);
    g = next;
  }
  if (observer) observer(rec.steps, g, x);
  if (rec.snapshots.empty() || rec.snapshots.back().n != rec.steps) {
    rec.snapshots.push_back({rec.steps, g, x});
  }
  rec.uniforms_consumed = rng.counter();
  return rec;
}

CoupledRecord sample_coupled(const WrappedGame& w, std::span<const double> x0, Scale scale,
                             double horizon, std::uint64_t seed) {
  if (scale.is_infinite()) throw ParameterError("coupled chains need a finite scale N");
  check_param_point(w, x0);
  CoupledRecord rec;
  rec.scale = scale.value();
  rec.horizon = horizon;
  rec.seed = seed;
  rec.steps = step_count(scale.value(), horizon);
  rec.live.reserve(rec.steps + 1);
  rec.frozen.reserve(rec.steps + 1);
  rec.equal.reserve(rec.steps + 1);

  RngStream rng(seed);
  const Distribution mu0 = initial_wrapped_distribution(w, x0);
  std::size_t g = inverse_cdf(mu0.probs(), rng.next_uniform());
  std::size_t gt = g;
  const FrozenSampler frozen(w, x0, scale);

  auto ws = w.make_workspace();
  std::vector<double> block(w.block_size());
  ParamPoint x(x0.begin(), x0.end());
  auto push = [&](std::uint64_t n) {
    rec.live.push_back(g);
    rec.frozen.push_back(gt);
    rec.equal.push_back(g == gt ? 1 : 0);
    if (g != gt && !rec.first_disagreement) rec.first_disagreement = n;
  };
  push(0);
  for (std::uint64_t n = 0; n < rec.steps; ++n) {
    const double xi = rng.next_uniform();
    w.transition_block(x, g, scale, block, ws);
    const std::size_t next = w.block_begin(g) + inverse_cdf(block, xi);
    x.swap(ws.shifted);
    g = next;
    gt = frozen.step(gt, xi);
    push(n + 1);
  }
  rec.uniforms_consumed = rng.counter();
  return rec;
}

OccupancyResult occupancy(const WrappedGame& w, std::span<const double> x_frozen,
                          std::size_t g_target, std::uint64_t n_steps, std::uint64_t seed,
                          Scale kernel) {
  if (g_target >= w.size()) throw std::out_of_range("target wrapped state outside E");
  if (n_steps < 1) throw ParameterError("occupancy needs at least one step");
  const Distribution mu = wrapped_stationary(w, x_frozen, kernel);
  const FrozenSampler sampler(w, x_frozen, kernel);
  const Distribution mu0 = initial_wrapped_distribution(w, x_frozen);
  RngStream rng(seed);
  std::size_t g = inverse_cdf(mu0.probs(), rng.next_uniform());
  std::uint64_t hits = 0;
  for (std::uint64_t n = 0; n < n_steps; ++n) {
    g = sampler.step(g, rng.next_uniform());
    hits += (g == g_target) ? 1 : 0;
  }
  OccupancyResult out;
  out.empirical = static_cast<double>(hits) / static_cast<double>(n_steps);
  out.stationary = mu[g_target];
  out.error = std::abs(out.empirical - out.stationary);
  return out;
}

double occupancy_error(const WrappedGame& w, std::span<const double> x_frozen,
                       std::size_t g_target, std::uint64_t n_steps, std::uint64_t seed,
                       Scale kernel) {
  return occupancy(w, x_frozen, g_target, n_steps, seed, kernel).error;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace mgfluid
