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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgfluid/ode.hpp"
#include "mgfluid/simulator.hpp"
#include "mgfluid/stationary.hpp"
#include "mgfluid/wrapped.hpp"

namespace mgfluid {

// max over snapshot times t_k = n_k / N of |X_{n_k} - y(t_k)|_2, with y
// linearly interpolated between ODE nodes. Throws ParameterError when the
// horizons differ or the ODE grid is coarser than the snapshot grid.
double sup_error(const TrajectoryRecord& traj, const OdeTrajectory& ode);

// RK4 node count used as the reference for scale N on [0, T]:
// ceil(10 N T) capped at 1e5 (and at least 1).
long reference_ode_steps(std::int64_t n, double horizon);

struct ComparisonReport {
  std::int64_t scale = 1;
  double horizon = 0.0;
  int reps = 0;
  std::uint64_t base_seed = 0;
  std::uint64_t stride = 1;
  long ode_steps = 0;
  std::vector<double> errors;  // one sup-error per replication
  double mean = 0.0;
  double std_error = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct McOptions {
  int jobs = 1;
  std::uint64_t stride = 0;  // 0: default_stride(N)
  long ode_steps = 0;        // 0: reference_ode_steps(N, T)
  // Reuse a precomputed reference (must span the same horizon).
  const OdeTrajectory* reference = nullptr;
};

// reps trajectories with seeds base_seed .. base_seed + reps - 1 against one
// shared RK4 solution of the limit ODE.
ComparisonReport mc_sup_error(const WrappedGame& w, std::span<const double> x0, Scale scale,
                              double horizon, int reps, std::uint64_t base_seed,
                              const McOptions& options = {});

// Reduces per-replication errors to mean / standard error / range.
void summarize(ComparisonReport& report);

struct RatePoint {
  double n = 0.0;
  double error = 0.0;
};

struct RateFit {
  std::vector<RatePoint> points;  // surviving points used in the fit
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the log-log residuals
  std::vector<std::string> warnings;
};

// Least-squares slope of log(error) against log(N). Non-positive or
// non-finite errors are dropped with a warning; fewer than three surviving
// points or repeated N values raise FitError.
RateFit rate_fit(std::span<const RatePoint> points);

struct AssumptionProbeOptions {
  int samples = 64;
  std::uint64_t seed = 0x5eed;
  // Finite scales at which the kernel Lipschitz constant is also probed.
  std::vector<std::int64_t> kernel_scales = {10, 100, 1000};
};

struct AssumptionReport {
  double ball_radius = 0.0;
  double probe_radius = 0.0;
  bool x0_in_ball = true;
  double policy_lipschitz = 0.0;      // sup |pi(x,s) - pi(y,s)|_1 / |x - y|_inf
  double kernel_lipschitz = 0.0;      // limit kernel, max-row L1 / |x - y|_2
  std::vector<std::pair<std::int64_t, double>> kernel_lipschitz_by_scale;
  double stationary_lipschitz = 0.0;  // TV(mu_x, mu_y) / |x - y|_2
  double drift_lipschitz = 0.0;       // |beta(x) - beta(y)|_2 / |x - y|_2
  std::optional<DoeblinCertificate> certificate;  // limit kernel at X0
  double kappa = 0.0;                 // smallest positive transition probability
  std::optional<double> minorization_floor;  // (kappa eps / S)^2 when eps > 0
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Empirical Lipschitz constants over random pairs in the parameter ball,
// the ball check on X0 and a Doeblin certificate for the limit kernel at X0.
AssumptionReport assumption_probe(const WrappedGame& w, const AssumptionProbeOptions& options = {});

}  // namespace mgfluid
