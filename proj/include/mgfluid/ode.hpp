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

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgfluid/distribution.hpp"
#include "mgfluid/wrapped.hpp"

namespace mgfluid {

using DriftFn = std::function<void(std::span<const double> x, std::span<double> out)>;

enum class OdeMethod { kEuler, kRk4 };

std::string to_string(OdeMethod m);
// Accepts "euler" or "rk4"; throws ParameterError otherwise.
OdeMethod parse_ode_method(const std::string& name);

// beta(x) = sum_g mu_x(g) f(x, g): the unscaled increment averaged against the
// invariant law of the wrapped kernel at x. The default infinite scale gives
// the limit drift; a finite scale gives beta^N.
ParamPoint beta(const WrappedGame& w, std::span<const double> x,
                Scale mode = Scale::infinite());

// Invariant law used by beta at x.
Distribution wrapped_stationary(const WrappedGame& w, std::span<const double> x,
                                Scale mode = Scale::infinite());

// Euclidean norm of beta^N(x) - beta(x).
double beta_gap(const WrappedGame& w, std::span<const double> x, Scale n);

// Drift of a wrapped game, callable as a DriftFn. With warm starts enabled
// each evaluation seeds power iteration with the previous invariant law; that
// makes the object stateful, so do not share a warm-started field between
// threads.
class DriftField {
 public:
  explicit DriftField(std::shared_ptr<const WrappedGame> w, Scale mode = Scale::infinite(),
                      bool warm_start = false);

  const WrappedGame& game() const { return *w_; }
  Scale mode() const { return mode_; }

  void evaluate(std::span<const double> x, std::span<double> out);
  ParamPoint operator()(std::span<const double> x);
  DriftFn as_function();

 private:
  std::shared_ptr<const WrappedGame> w_;
  Scale mode_;
  bool warm_start_;
  std::optional<Distribution> last_;
};

struct OdeTrajectory {
  OdeMethod method = OdeMethod::kEuler;
  double horizon = 0.0;
  long steps = 0;
  std::vector<double> t;           // uniform grid t_0 = 0, ..., t_K = horizon
  std::vector<ParamPoint> y;       // one point per grid node
  double max_sup_norm = 0.0;       // largest |y_k|_inf seen
  bool left_ball = false;          // set when a ball radius was supplied and exceeded
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;

  std::size_t dimension() const { return y.empty() ? 0 : y.front().size(); }
  // Linear interpolation between grid nodes; t is clamped to [0, horizon].
  ParamPoint at(double time) const;
};

struct IntegrateOptions {
  // When set, nodes with |y|_inf > radius + ball_tolerance raise a warning.
  std::optional<double> ball_radius;
  double ball_tolerance = 1e-6;
};

// Fixed-step integration of y' = drift(y) on [0, horizon] with `steps`
// uniform steps. Euler: y_{n+1} = y_n + h drift(y_n). Throws ParameterError
// for steps < 1 or horizon <= 0 and DriftEvaluationError when the drift fails.
OdeTrajectory integrate(const DriftFn& drift, std::span<const double> x0, double horizon,
                        long steps, OdeMethod method, const IntegrateOptions& options = {});

// Integrates a wrapped-game drift; the parameter ball of the game is used
// for the excursion warning.
OdeTrajectory integrate(DriftField& field, std::span<const double> x0, double horizon,
                        long steps, OdeMethod method);

}  // namespace mgfluid
