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

#include "mgfluid/ode.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>

#include "mgfluid/errors.hpp"
#include "mgfluid/stationary.hpp"

namespace mgfluid {

std::string to_string(OdeMethod m) { return m == OdeMethod::kEuler ? "euler" : "rk4"; }

OdeMethod parse_ode_method(const std::string& name) {
  if (name == "euler") return OdeMethod::kEuler;
  if (name == "rk4") return OdeMethod::kRk4;
  throw ParameterError("unknown ODE method '" + name + "' (expected euler or rk4)");
}

namespace {

void average_increment(const WrappedGame& w, std::span<const double> x, const Distribution& mu,
                       std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> f(static_cast<std::size_t>(w.dimension()));
  for (std::size_t g = 0; g < w.size(); ++g) {
    if (mu[g] == 0.0) continue;
    w.increment(x, g, f);
    for (std::size_t k = 0; k < f.size(); ++k) out[k] += mu[g] * f[k];
  }
}

}  // namespace

Distribution wrapped_stationary(const WrappedGame& w, std::span<const double> x, Scale mode) {
  return stationary_distribution(transition_matrix(w, x, mode));
}

ParamPoint beta(const WrappedGame& w, std::span<const double> x, Scale mode) {
  const Distribution mu = wrapped_stationary(w, x, mode);
  ParamPoint out(static_cast<std::size_t>(w.dimension()));
  average_increment(w, x, mu, out);
  return out;
}

double beta_gap(const WrappedGame& w, std::span<const double> x, Scale n) {
  const ParamPoint finite = beta(w, x, n);
  const ParamPoint limit = beta(w, x, Scale::infinite());
  double s = 0.0;
  for (std::size_t k = 0; k < finite.size(); ++k) s += (finite[k] - limit[k]) * (finite[k] - limit[k]);
  return std::sqrt(s);
}

DriftField::DriftField(std::shared_ptr<const WrappedGame> w, Scale mode, bool warm_start)
    : w_(std::move(w)), mode_(mode), warm_start_(warm_start) {
  if (!w_) throw ParameterError("drift field needs a wrapped game");
}

void DriftField::evaluate(std::span<const double> x, std::span<double> out) {
  const Eigen::MatrixXd P = transition_matrix(*w_, x, mode_);
  Distribution mu = warm_start_ && last_ ? power_iteration_stationary(P, {}, &*last_)
                                         : stationary_distribution(P);
  average_increment(*w_, x, mu, out);
  if (warm_start_) last_ = std::move(mu);
}

ParamPoint DriftField::operator()(std::span<const double> x) {
  ParamPoint out(static_cast<std::size_t>(w_->dimension()));
  evaluate(x, out);
  return out;
}

DriftFn DriftField::as_function() {
  return [this](std::span<const double> x, std::span<double> out) { evaluate(x, out); };
}

ParamPoint OdeTrajectory::at(double time) const {
  if (t.empty()) throw ParameterError("empty trajectory");
  if (t.size() == 1 || time <= t.front()) return y.front();
  if (time >= t.back()) return y.back();
  const double pos = time * static_cast<double>(steps) / horizon;
  const double node = std::round(pos);
  if (std::abs(pos - node) <= 1e-9 * std::max(1.0, node))
    return y[std::min(static_cast<std::size_t>(node), y.size() - 1)];
  auto k = static_cast<std::size_t>(std::floor(pos));
  k = std::min(k, t.size() - 2);
  const double w = (time - t[k]) / (t[k + 1] - t[k]);
  ParamPoint out(y[k].size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - w) * y[k][i] + w * y[k + 1][i];
  return out;
}

OdeTrajectory integrate(const DriftFn& drift, std::span<const double> x0, double horizon,
                        long steps, OdeMethod method, const IntegrateOptions& options) {
  if (steps < 1) throw ParameterError("ODE step count must be >= 1");
  if (!(horizon > 0.0)) throw ParameterError("ODE horizon must be positive");
  const auto start = std::chrono::steady_clock::now();

  OdeTrajectory traj;
  traj.method = method;
  traj.horizon = horizon;
  traj.steps = steps;
  traj.t.reserve(static_cast<std::size_t>(steps) + 1);
  traj.y.reserve(static_cast<std::size_t>(steps) + 1);

  const std::size_t d = x0.size();
  const double h = horizon / static_cast<double>(steps);
  ParamPoint y(x0.begin(), x0.end());
  ParamPoint k1(d), k2(d), k3(d), k4(d), tmp(d);

  auto eval = [&](long node, std::span<const double> at, std::span<double> out) {
    try {
      drift(at, out);
    } catch (const DriftEvaluationError&) {
      throw;
    } catch (const std::exception& e) {
      throw DriftEvaluationError(node, e.what());
    }
    for (double v : out) {
      if (!std::isfinite(v)) throw DriftEvaluationError(node, "non-finite drift");
    }
  };
  auto record = [&](long node) {
    traj.t.push_back(horizon * static_cast<double>(node) / static_cast<double>(steps));
    traj.y.push_back(y);
    double norm = 0.0;
    for (double v : y) norm = std::max(norm, std::abs(v));
    traj.max_sup_norm = std::max(traj.max_sup_norm, norm);
    if (options.ball_radius && norm > *options.ball_radius + options.ball_tolerance &&
        !traj.left_ball) {
      traj.left_ball = true;
      traj.warnings.push_back("trajectory leaves the parameter ball at node " +
                              std::to_string(node) + " (|y|_inf = " + std::to_string(norm) +
                              ", radius " + std::to_string(*options.ball_radius) + ")");
    }
  };

  record(0);
  for (long n = 0; n < steps; ++n) {
    if (method == OdeMethod::kEuler) {
      eval(n, y, k1);
      for (std::size_t i = 0; i < d; ++i) y[i] += h * k1[i];
    } else {
      eval(n, y, k1);
      for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
      eval(n, tmp, k2);
      for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
      eval(n, tmp, k3);
      for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + h * k3[i];
      eval(n, tmp, k4);
      for (std::size_t i = 0; i < d; ++i) {
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
    }
    record(n + 1);
  }
  traj.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

OdeTrajectory integrate(DriftField& field, std::span<const double> x0, double horizon,
                        long steps, OdeMethod method) {
  IntegrateOptions options;
  if (field.game().has_parameter_radius()) options.ball_radius = field.game().parameter_radius();
  return integrate(field.as_function(), x0, horizon, steps, method, options);
}

}  // namespace mgfluid
