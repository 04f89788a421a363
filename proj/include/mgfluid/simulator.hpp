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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgfluid/wrapped.hpp"

namespace mgfluid {

// Inverse-CDF lookup over a probability vector: the interval of atom i is
// ]c_{i-1}, c_i] with c_i the running sum, except that xi = 0 lands on the
// first atom with positive mass. Atoms with zero mass are never returned;
// xi beyond the (rounded) total falls on the last positive atom.
std::size_t inverse_cdf(std::span<const double> probs, double xi);

// One transition of the wrapped chain: the unique successor g' with xi in
// the interval of g' under row g of P^N_x. Only the |A| * S successors that
// can have positive mass are enumerated.
std::size_t sample_step(const WrappedGame& w, std::span<const double> x, std::size_t g,
                        Scale scale, double xi);

// Caches the rows of a kernel whose parameters never move, so repeated steps
// skip the policy evaluation. Produces the same successor as sample_step for
// the same (x, g, scale, xi).
class FrozenSampler {
 public:
  FrozenSampler(const WrappedGame& w, std::span<const double> x, Scale scale);
  std::size_t step(std::size_t g, double xi) const;

 private:
  std::size_t block_size_;
  std::vector<std::size_t> begin_;
  std::vector<double> rows_;  // |E| blocks of block_size_ entries
};

// Number of transitions floor(N * T). Products within 1e-9 (relative) of an
// integer snap to it: N = 1e5, T = 1e-3 gives 100.
std::uint64_t step_count(std::int64_t n, double horizon);

// Default snapshot stride max(1, floor(N / 100)).
std::uint64_t default_stride(std::int64_t n);

struct Snapshot {
  std::uint64_t n = 0;
  std::size_t g = 0;
  ParamPoint x;
};

struct TrajectoryRecord {
  std::int64_t scale = 1;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  std::uint64_t stride = 1;
  std::string rng_id;
  std::uint64_t uniforms_consumed = 0;
  // Nodes n = 0, stride, 2 * stride, ... and always n = steps.
  std::vector<Snapshot> snapshots;
  std::vector<double> cumulative_reward;  // per player, over G_0 .. G_{steps-1}
};

// Called for every n = 0..steps with (n, G_n, X_n).
using StepObserver =
    std::function<void(std::uint64_t n, std::size_t g, std::span<const double> x)>;

// X_{n+1} = X_n + f(X_n, G_n) / N and G_{n+1} = h^N(X_n, G_n, xi_{n+1}) for
// floor(N T) steps, with G_0 drawn from mu_0 by inverse CDF on xi_0.
// stride = 0 selects default_stride(N).
TrajectoryRecord sample_trajectory(const WrappedGame& w, std::span<const double> x0, Scale scale,
                                   double horizon, std::uint64_t seed, std::uint64_t stride = 0,
                                   const StepObserver& observer = {});

struct CoupledRecord {
  std::int64_t scale = 1;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  std::uint64_t uniforms_consumed = 0;
  std::vector<std::size_t> live;    // G_n, parameters updating
  std::vector<std::size_t> frozen;  // G~_n, parameters pinned at X_0
  std::vector<std::uint8_t> equal;  // 1 where G_n == G~_n
  std::optional<std::uint64_t> first_disagreement;
};

// Live and frozen chains from the same G_0 driven by the same uniforms.
CoupledRecord sample_coupled(const WrappedGame& w, std::span<const double> x0, Scale scale,
                             double horizon, std::uint64_t seed);

struct OccupancyResult {
  double error = 0.0;       // |empirical - stationary|
  double empirical = 0.0;   // (1/n) sum_{k=1..n} 1{G_k = g}
  double stationary = 0.0;  // mu_x(g)
};

// Runs the chain frozen at x (limit kernel by default) for n_steps steps
// from G_0 ~ mu_0(x) and compares the occupancy of g_target with its exact
// invariant mass.
OccupancyResult occupancy(const WrappedGame& w, std::span<const double> x_frozen,
                          std::size_t g_target, std::uint64_t n_steps, std::uint64_t seed,
                          Scale kernel = Scale::infinite());
double occupancy_error(const WrappedGame& w, std::span<const double> x_frozen,
                       std::size_t g_target, std::uint64_t n_steps, std::uint64_t seed,
                       Scale kernel = Scale::infinite());

// Runs body(i) for i in [0, count) on up to `jobs` threads. Work items are
// independent; results must be written to per-index slots.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace mgfluid
