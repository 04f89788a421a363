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

#include "mgfluid/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>

#include "mgfluid/errors.hpp"

namespace mgfluid {

namespace {

double euclid(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double sup_norm_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

}  // namespace

double sup_error(const TrajectoryRecord& traj, const OdeTrajectory& ode) {
  if (std::abs(traj.horizon - ode.horizon) > 1e-12 * std::max(1.0, traj.horizon)) {
    throw ParameterError("trajectory horizon " + std::to_string(traj.horizon) +
                         " differs from ODE horizon " + std::to_string(ode.horizon));
  }
  if (ode.t.size() < 2) throw ParameterError("ODE reference has no steps");
  const double ode_h = ode.horizon / static_cast<double>(ode.steps);
  const double snap_h = static_cast<double>(traj.stride) / static_cast<double>(traj.scale);
  if (ode_h > snap_h * (1.0 + 1e-12)) {
    throw ParameterError("ODE grid (h = " + std::to_string(ode_h) +
                         ") is coarser than the snapshot grid (h = " + std::to_string(snap_h) + ")");
  }
  double worst = 0.0;
  for (const Snapshot& snap : traj.snapshots) {
    const double t = static_cast<double>(snap.n) / static_cast<double>(traj.scale);
    const ParamPoint y = ode.at(t);
    if (y.size() != snap.x.size()) throw ParameterError("ODE and trajectory dimensions differ");
    worst = std::max(worst, euclid(snap.x, y));
  }
  return worst;
}

long reference_ode_steps(std::int64_t n, double horizon) {
  const double k = std::ceil(10.0 * static_cast<double>(n) * horizon - 1e-9);
  return static_cast<long>(std::clamp(k, 1.0, 1e5));
}

void summarize(ComparisonReport& report) {
  const auto& e = report.errors;
  if (e.empty()) return;
  double sum = 0.0;
  for (double v : e) sum += v;
  report.mean = sum / static_cast<double>(e.size());
  double ss = 0.0;
  for (double v : e) ss += (v - report.mean) * (v - report.mean);
  report.std_error =
      e.size() > 1 ? std::sqrt(ss / static_cast<double>(e.size() - 1) / static_cast<double>(e.size()))
                   : 0.0;
  report.min = *std::min_element(e.begin(), e.end());
  report.max = *std::max_element(e.begin(), e.end());
  // Guard the range invariant against summation rounding.
  report.mean = std::clamp(report.mean, report.min, report.max);
}

ComparisonReport mc_sup_error(const WrappedGame& w, std::span<const double> x0, Scale scale,
                              double horizon, int reps, std::uint64_t base_seed,
                              const McOptions& options) {
  if (reps < 1) throw ParameterError("reps must be >= 1");
  if (scale.is_infinite()) throw ParameterError("comparison needs a finite scale N");
  check_param_point(w, x0);

  ComparisonReport report;
  report.scale = scale.value();
  report.horizon = horizon;
  report.reps = reps;
  report.base_seed = base_seed;
  report.stride = options.stride == 0 ? default_stride(scale.value()) : options.stride;

  OdeTrajectory owned;
  const OdeTrajectory* ode = options.reference;
  if (!ode) {
    const long k = options.ode_steps > 0 ? options.ode_steps : reference_ode_steps(scale.value(), horizon);
    DriftField field(std::make_shared<const WrappedGame>(w));
    owned = integrate(field, x0, horizon, k, OdeMethod::kRk4);
    ode = &owned;
  }
  report.ode_steps = ode->steps;

  report.errors.assign(static_cast<std::size_t>(reps), 0.0);
  parallel_for(static_cast<std::size_t>(reps), options.jobs, [&](std::size_t r) {
    const TrajectoryRecord traj =
        sample_trajectory(w, x0, scale, horizon, base_seed + r, report.stride);
    report.errors[r] = sup_error(traj, *ode);
  });
  summarize(report);
  return report;
}

RateFit rate_fit(std::span<const RatePoint> points) {
  RateFit fit;
  for (const RatePoint& p : points) {
    if (!(p.error > 0.0) || !std::isfinite(p.error)) {
      fit.warnings.push_back("dropped point N = " + std::to_string(p.n) + " with error " +
                             std::to_string(p.error));
      continue;
    }
    if (!(p.n > 0.0) || !std::isfinite(p.n)) {
      fit.warnings.push_back("dropped point with invalid N = " + std::to_string(p.n));
      continue;
    }
    fit.points.push_back(p);
  }
  std::set<double> distinct;
  for (const RatePoint& p : fit.points) {
    if (!distinct.insert(p.n).second) {
      throw FitError("rate fit needs distinct N values (repeated " + std::to_string(p.n) + ")");
    }
  }
  if (fit.points.size() < 3) {
    throw FitError("rate fit needs at least 3 valid points, got " +
                   std::to_string(fit.points.size()));
  }
  const auto m = static_cast<double>(fit.points.size());
  double sx = 0.0, sy = 0.0;
  for (const RatePoint& p : fit.points) {
    sx += std::log(p.n);
    sy += std::log(p.error);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (const RatePoint& p : fit.points) {
    const double dx = std::log(p.n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p.error) - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (const RatePoint& p : fit.points) {
    const double r = std::log(p.error) - (fit.intercept + fit.slope * std::log(p.n));
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / m);
  return fit;
}

AssumptionReport assumption_probe(const WrappedGame& w, const AssumptionProbeOptions& options) {
  if (options.samples < 2) throw ParameterError("assumption probe needs at least 2 samples");
  AssumptionReport rep;
  rep.ball_radius = w.parameter_radius();
  rep.probe_radius = rep.ball_radius > 0.0 ? rep.ball_radius : 1.0;
  const ParamPoint x0 = w.initial_params();
  double x0_norm = 0.0;
  for (double v : x0) x0_norm = std::max(x0_norm, std::abs(v));
  rep.x0_in_ball = x0_norm <= rep.ball_radius + 1e-12;
  if (!rep.x0_in_ball) rep.violations.push_back("X0 lies outside the parameter ball");

  const auto d = static_cast<std::size_t>(w.dimension());
  const int S = w.num_states();
  std::mt19937_64 gen(options.seed);
  std::uniform_real_distribution<double> coord(-rep.probe_radius, rep.probe_radius);
  std::bernoulli_distribution coin(0.5);

  auto clip = [&](double v) { return std::clamp(v, -rep.probe_radius, rep.probe_radius); };
  std::map<std::int64_t, double> by_scale;
  for (int i = 0; i < options.samples; ++i) {
    ParamPoint x(d), y(d);
    for (auto& v : x) v = coord(gen);
    if (i % 2 == 0) {
      // Far pair.
      for (auto& v : y) v = coord(gen);
    } else {
      // Nearby pair along a random sign direction.
      const double h = 1e-4 * rep.probe_radius;
      for (std::size_t k = 0; k < d; ++k) {
        y[k] = clip(x[k] + (coin(gen) ? h : -h));
        if (y[k] == x[k]) y[k] = x[k] + (x[k] > 0 ? -h : h);
      }
    }
    const double dinf = sup_norm_diff(x, y);
    const double d2 = euclid(x, y);
    if (!(d2 > 0.0)) continue;

    for (int s = 0; s < S; ++s) {
      const auto px = w.joint_policy(x, s);
      const auto py = w.joint_policy(y, s);
      double l1 = 0.0;
      for (std::size_t a = 0; a < px.size(); ++a) l1 += std::abs(px[a] - py[a]);
      rep.policy_lipschitz = std::max(rep.policy_lipschitz, l1 / dinf);
    }
    const Eigen::MatrixXd Px = transition_matrix(w, x, Scale::infinite());
    const Eigen::MatrixXd Py = transition_matrix(w, y, Scale::infinite());
    rep.kernel_lipschitz = std::max(rep.kernel_lipschitz, max_row_l1(Px, Py) / d2);
    for (std::int64_t n : options.kernel_scales) {
      const double l = max_row_l1(transition_matrix(w, x, Scale::finite(n)),
                                  transition_matrix(w, y, Scale::finite(n))) / d2;
      by_scale[n] = std::max(by_scale[n], l);
    }
    try {
      const Distribution mx = stationary_distribution(Px);
      const Distribution my = stationary_distribution(Py);
      rep.stationary_lipschitz = std::max(rep.stationary_lipschitz, tv_distance(mx, my) / d2);
      ParamPoint bx(d, 0.0), by(d, 0.0);
      std::vector<double> f(d);
      for (std::size_t g = 0; g < w.size(); ++g) {
        w.increment(x, g, f);
        for (std::size_t k = 0; k < d; ++k) bx[k] += mx[g] * f[k];
        w.increment(y, g, f);
        for (std::size_t k = 0; k < d; ++k) by[k] += my[g] * f[k];
      }
      rep.drift_lipschitz = std::max(rep.drift_lipschitz, euclid(bx, by) / d2);
    } catch (const ErgodicityError& e) {
      rep.violations.push_back(std::string("limit kernel not ergodic at a probe point: ") +
                               e.what());
      break;
    }
  }
  for (const auto& [n, l] : by_scale) rep.kernel_lipschitz_by_scale.emplace_back(n, l);

  for (double v : {rep.policy_lipschitz, rep.kernel_lipschitz, rep.stationary_lipschitz,
                   rep.drift_lipschitz}) {
    if (!std::isfinite(v)) {
      rep.violations.push_back("non-finite Lipschitz estimate");
      break;
    }
  }

  const Eigen::MatrixXd P0 = transition_matrix(w, x0, Scale::infinite());
  rep.certificate = find_doeblin_certificate(P0, static_cast<int>(2 * w.size()));
  if (!rep.certificate) {
    rep.violations.push_back("no Doeblin certificate for k <= 2|E| on the limit kernel at X0");
  }

  rep.kappa = w.game().min_positive_transition();
  std::optional<double> eps;
  for (const auto& r : w.reinforcers()) {
    if (const auto* q = dynamic_cast<const QTableReinforcer*>(r.get())) {
      eps = eps ? std::min(*eps, q->params().epsilon) : q->params().epsilon;
    } else {
      eps.reset();
      break;
    }
  }
  if (eps && *eps > 0.0) {
    const double base = rep.kappa * *eps / static_cast<double>(S);
    rep.minorization_floor = base * base;
  }
  return rep;
}

}  // namespace mgfluid
