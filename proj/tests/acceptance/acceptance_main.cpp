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

// Acceptance suite for the canonical two-player game. Prints one PASS/FAIL
// line per criterion; exit status is nonzero when any criterion fails.
// Usage: acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "mgfluid/cli.hpp"
#include "mgfluid/config.hpp"
#include "mgfluid/diagnostics.hpp"
#include "mgfluid/io.hpp"
#include "mgfluid/ode.hpp"
#include "mgfluid/rng.hpp"
#include "mgfluid/simulator.hpp"
#include "mgfluid/stationary.hpp"
#include "mgfluid/wrapped.hpp"

using namespace mgfluid;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

json canonical_doc() {
  return json::parse(io::read_text(fs::path(MGFLUID_CONFIG_DIR) / "canonical_2p.json"));
}

std::shared_ptr<const WrappedGame> canonical(double alpha = 0.1) {
  auto doc = canonical_doc();
  for (auto& r : doc["reinforcers"]) r["alpha"] = alpha;
  return parse_config(doc).wrapped();
}

double ls_slope(const std::vector<double>& ns, const std::vector<double>& ys) {
  std::vector<RatePoint> pts;
  for (std::size_t i = 0; i < ns.size(); ++i) pts.push_back({ns[i], ys[i]});
  return rate_fit(pts).slope;
}

Eigen::MatrixXd random_ergodic(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (u(gen) < 0.3) P(i, j) = u(gen);
    P(i, (i + 1) % n) += 0.05 + u(gen);
  }
  P(0, 0) += 0.5;
  for (int i = 0; i < n; ++i) P.row(i) /= P.row(i).sum();
  return P;
}

ParamPoint random_point(std::mt19937_64& gen, double radius, std::size_t d) {
  std::uniform_real_distribution<double> u(-radius, radius);
  ParamPoint x(d);
  for (auto& v : x) v = u(gen);
  return x;
}

// 1. Stationary solver.
void stationary_solver(Outcome& o) {
  Eigen::MatrixXd P(2, 2);
  P << 0.9, 0.1, 0.5, 0.5;
  const auto mu = stationary_distribution(P);
  const double res = stationary_residual(P, mu);
  const double dev = std::max(std::abs(mu[0] - 5.0 / 6.0), std::abs(mu[1] - 1.0 / 6.0));
  o.require(dev <= 1e-12, "2x2 equals (5/6, 1/6)");
  o.require(res <= 1e-12, "2x2 residual <= 1e-12");

  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> size(2, 64);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto R = random_ergodic(gen, size(gen));
    worst = std::max(worst, tv_distance(stationary_distribution(R), power_iteration_stationary(R)));
  }
  o.require(worst <= 1e-9, "direct vs power TV <= 1e-9");
  o.detail << "2x2 deviation " << dev << ", residual " << res << ", worst TV over 50 random "
           << worst;
}

// 2. Doeblin certificate and mixing domination.
void doeblin_mixing(Outcome& o) {
  const auto w = canonical();
  const auto P = transition_matrix(*w, w->initial_params(), Scale::infinite());
  const auto cert = find_doeblin_certificate(P);
  o.require(cert.has_value(), "certificate found");
  if (!cert) return;
  const int E = static_cast<int>(w->size());
  o.require(cert->k <= 2 * E && cert->c > 0.0, "k <= 2|E| and c > 0");
  const double kappa = w->game().min_positive_transition();
  const double eps = canonical_doc()["reinforcers"][0]["epsilon"].get<double>();
  const double floor = std::pow(kappa * eps / w->num_states(), 2);
  if (cert->k == 2) o.require(cert->c >= floor, "c >= (kappa eps / S)^2");
  const auto mu = stationary_distribution(P);
  double worst_excess = -1.0;
  for (int start = 0; start < E; ++start) {
    const auto curve = mixing_curve(P, Distribution::point_mass(E, start), 200);
    for (int n = 0; n <= 200; ++n)
      worst_excess = std::max(worst_excess, curve[n] - doeblin_bound(*cert, n));
  }
  o.require(worst_excess <= 1e-12, "TV(n) <= (1-c)^floor(n/k)");
  o.detail << "|E| " << E << ", k " << cert->k << ", c " << cert->c << ", floor " << floor
           << ", max TV - bound " << worst_excess;
}

// 3. Kernel perturbation of the drift.
void kernel_perturbation(Outcome& o) {
  const auto w = canonical();
  std::mt19937_64 gen(31);
  const double radius = w->parameter_radius();
  double lo = 0.0, hi = -10.0;
  for (int i = 0; i < 5; ++i) {
    const auto x = random_point(gen, radius, w->dimension());
    std::vector<double> ns, gaps;
    for (long n : {10L, 100L, 1000L}) {
      ns.push_back(static_cast<double>(n));
      gaps.push_back(beta_gap(*w, x, Scale::finite(n)));
    }
    const double s = ls_slope(ns, gaps);
    lo = i == 0 ? s : std::min(lo, s);
    hi = std::max(hi, s);
  }
  o.require(lo >= -1.25 && hi <= -0.75, "slopes in [-1.25, -0.75]");
  o.detail << "slopes over 5 points in [" << lo << ", " << hi << "]";
}

// 4. Ergodic occupancy.
void occupancy_rate(Outcome& o) {
  const auto w = canonical();
  const auto x = w->initial_params();
  const auto mu = wrapped_stationary(*w, x);
  const auto probs = mu.probs();
  const auto target =
      static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
  std::vector<double> ns, means;
  for (std::uint64_t steps : {1000ULL, 10000ULL, 100000ULL}) {
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed)
      sum += occupancy_error(*w, x, target, steps, seed);
    ns.push_back(static_cast<double>(steps));
    means.push_back(sum / 200.0);
  }
  const double s = ls_slope(ns, means);
  o.require(s >= -0.65 && s <= -0.35, "slope in [-0.65, -0.35]");
  o.detail << "target " << target << ", mean errors " << means[0] << " " << means[1] << " "
           << means[2] << ", slope " << s;
}

// 5. Coupling disagreement at n = 100.
void coupling(Outcome& o) {
  const int seeds = 1000;
  const std::uint64_t n_at = 100;
  auto disagreement = [&](const WrappedGame& w, std::int64_t N) {
    const double horizon = static_cast<double>(n_at) / static_cast<double>(N);
    int count = 0;
    for (int s = 1; s <= seeds; ++s) {
      const auto rec = sample_coupled(w, w.initial_params(), Scale::finite(N), horizon, s);
      if (rec.equal.at(n_at) == 0) ++count;
    }
    return static_cast<double>(count) / seeds;
  };
  const auto w = canonical();
  const auto w0 = canonical(0.0);
  std::vector<double> p;
  double p0 = 0.0;
  for (std::int64_t N : {1000, 10000, 100000}) {
    p.push_back(disagreement(*w, N));
    p0 = std::max(p0, disagreement(*w0, N));
  }
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double se_a = std::sqrt(p[i - 1] * (1 - p[i - 1]) / seeds);
    const double se_b = std::sqrt(p[i] * (1 - p[i]) / seeds);
    o.require(p[i] <= p[i - 1] + 1.96 * std::hypot(se_a, se_b), "non-increasing at 95%");
  }
  o.require(p0 == 0.0, "zero disagreement without learning");
  o.detail << "P(G_100 != G~_100) " << p[0] << " " << p[1] << " " << p[2]
           << ", alpha=0 max " << p0;
}

// 6. Fluid limit error.
void fluid_limit(Outcome& o) {
  const auto w = canonical();
  std::vector<double> means;
  for (std::int64_t N : {100, 1000, 10000})
    means.push_back(mc_sup_error(*w, w->initial_params(), Scale::finite(N), 1.0, 100, 1).mean);
  o.require(means[1] < means[0] && means[2] < means[1], "strictly decreasing");
  o.require(means[2] <= 0.5 * means[0], "error(1e4) <= error(1e2) / 2");
  const auto w0 = canonical(0.0);
  double control = 0.0;
  for (std::int64_t N : {100, 1000, 10000})
    control = std::max(control, mc_sup_error(*w0, w0->initial_params(), Scale::finite(N), 1.0, 100, 1).max);
  o.require(control == 0.0, "alpha = 0 error exactly 0");
  o.detail << "mean sup errors " << means[0] << " " << means[1] << " " << means[2]
           << ", ratio " << means[0] / means[2] << ", alpha=0 max " << control;
}

// 7. Q-table invariants along a long unscaled run.
void qtable_invariants(Outcome& o) {
  const auto w = canonical();
  const double radius = w->parameter_radius() + 1e-9;
  const auto& rs = w->reinforcers();
  double max_norm = 0.0, min_prob = 1.0, worst_gap = 1.0;
  std::vector<double> pi;
  const StepObserver watch = [&](std::uint64_t, std::size_t, std::span<const double> x) {
    for (double v : x) max_norm = std::max(max_norm, std::abs(v));
    for (int i = 0; i < static_cast<int>(rs.size()); ++i) {
      const auto& r = *rs[i];
      const double floor = r.probability_floor();
      pi.resize(static_cast<std::size_t>(r.num_actions()));
      const auto slice = x.subspan(w->param_offset(i), static_cast<std::size_t>(r.dimension()));
      for (int s = 0; s < w->num_states(); ++s) {
        r.policy(slice, s, pi);
        for (double p : pi) {
          min_prob = std::min(min_prob, p);
          worst_gap = std::min(worst_gap, p - floor);
        }
      }
    }
  };
  const auto rec = sample_trajectory(*w, w->initial_params(), Scale::finite(1), 1e6, 11,
                                     1'000'000, watch);
  o.require(rec.steps == 1'000'000, "1e6 steps");
  o.require(max_norm <= radius, "|X|_inf within the ball");
  o.require(worst_gap >= 0.0, "policy >= eps / A");
  o.detail << "steps " << rec.steps << ", max |X|_inf " << max_norm << " (radius "
           << w->parameter_radius() << "), min policy probability " << min_prob;
}

// 8. Sampler frequencies and uniform accounting.
void sampler(Outcome& o) {
  const auto w = canonical();
  const ParamPoint x = {0.5, -0.3, 0.2, 0.9, -1.0, 0.4, 0.1, 0.0};
  const Scale sc = Scale::finite(10);
  const auto P = transition_matrix(*w, x, sc);
  const FrozenSampler frozen(*w, x, sc);
  RngStream rng(8);
  const int draws = 1'000'000;
  double worst_z = 0.0;
  for (std::size_t g = 0; g < w->size(); ++g) {
    std::vector<int> counts(w->size(), 0);
    for (int i = 0; i < draws; ++i) counts[frozen.step(g, rng.next_uniform())]++;
    for (std::size_t j = 0; j < w->size(); ++j) {
      const double p = P(g, j);
      const double sigma = std::sqrt(draws * p * (1 - p));
      const double dev = std::abs(counts[j] - draws * p);
      if (sigma == 0.0) {
        o.require(dev == 0.0, "impossible transition sampled");
      } else {
        worst_z = std::max(worst_z, dev / sigma);
      }
    }
  }
  o.require(worst_z <= 4.0, "within 4 sigma");
  bool counts_ok = true;
  for (auto [N, T] : std::vector<std::pair<std::int64_t, double>>{{10, 0.35}, {100, 1.0}, {7, 3.0}, {1000, 0.5}}) {
    const auto rec = sample_trajectory(*w, w->initial_params(), Scale::finite(N), T, 3);
    const auto expect = static_cast<std::uint64_t>(std::floor(N * T + 1e-9)) + 1;
    counts_ok = counts_ok && rec.uniforms_consumed == expect;
  }
  o.require(counts_ok, "floor(NT) + 1 uniforms");
  o.detail << "worst |z| over " << w->size() << " rows x 1e6 draws " << worst_z
           << ", uniform counts " << (counts_ok ? "exact" : "off");
}

// 9. ODE integrator accuracy and order.
void integrator(Outcome& o) {
  const DriftFn decay = [](std::span<const double> x, std::span<double> out) { out[0] = -x[0]; };
  const std::vector<double> one = {1.0};
  const double e_euler = std::abs(integrate(decay, one, 1.0, 1000, OdeMethod::kEuler).y.back()[0] - std::exp(-1.0));
  const double e_rk4 = std::abs(integrate(decay, one, 1.0, 100, OdeMethod::kRk4).y.back()[0] - std::exp(-1.0));
  o.require(e_euler <= 2e-3, "Euler K=1000 within 2e-3");
  o.require(e_rk4 <= 1e-9, "RK4 K=100 within 1e-9");

  const auto w = canonical();
  DriftField field(w);
  const auto x0 = w->initial_params();
  const auto ref = integrate(field, x0, 1.0, 400, OdeMethod::kRk4);
  std::vector<double> ks, gaps;
  for (long k : {10L, 20L, 40L, 80L}) {
    const auto eu = integrate(field, x0, 1.0, k, OdeMethod::kEuler);
    double gap = 0.0;
    for (std::size_t i = 0; i < x0.size(); ++i)
      gap = std::max(gap, std::abs(eu.y.back()[i] - ref.y.back()[i]));
    ks.push_back(static_cast<double>(k));
    gaps.push_back(gap);
  }
  const double s = ls_slope(ks, gaps);
  o.require(s >= -1.3 && s <= -0.7, "Euler gap slope in [-1.3, -0.7]");
  o.detail << "exp(-1) errors Euler " << e_euler << ", RK4 " << e_rk4 << "; Euler gap slope " << s;
}

// 10. Learning-rate reparametrization.
void reparametrization(Outcome& o) {
  const double c = 2.5;
  const auto slow = canonical(0.1);
  const auto fast = canonical(0.1 * c);
  double worst = 0.0;
  for (auto m : {OdeMethod::kEuler, OdeMethod::kRk4}) {
    DriftField fs_(fast), ss_(slow);
    const auto a = integrate(fs_, fast->initial_params(), 2.0, 200, m);
    const auto b = integrate(ss_, slow->initial_params(), 2.0 * c, 200, m);
    for (std::size_t k = 0; k < a.y.size(); ++k)
      for (std::size_t i = 0; i < a.y[k].size(); ++i)
        worst = std::max(worst, std::abs(a.y[k][i] - b.y[k][i]));
  }
  o.require(worst <= 1e-8, "nodewise within 1e-8");
  o.detail << "c " << c << ", max nodewise difference " << worst;
}

// 11. End-to-end reproducibility of compare.
void reproducibility(Outcome& o) {
  const fs::path root = fs::temp_directory_path() / "mgfluid_acceptance_repro";
  fs::remove_all(root);
  const fs::path config = fs::path(MGFLUID_CONFIG_DIR) / "canonical_2p.json";
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* name : {"a", "b"}) {
    std::ostringstream out, err;
    const int code = cli::run({"compare", "--config", config.string(), "--out", (root / name).string()}, out, err);
    o.require(code == cli::kOk, std::string("compare run ") + name + " exit code");
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(root / name))
      if (e.path().filename() != "manifest.json") files[e.path().filename().string()] = io::read_text(e.path());
    runs.push_back(std::move(files));
  }
  std::size_t identical = 0;
  for (const auto& [name, text] : runs[0]) {
    const auto it = runs[1].find(name);
    if (it != runs[1].end() && it->second == text) ++identical;
  }
  o.require(!runs[0].empty() && identical == runs[0].size() && runs[0].size() == runs[1].size(),
            "byte-identical outputs");
  o.detail << identical << "/" << runs[0].size() << " output files byte-identical";
  fs::remove_all(root);
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Outcome&)> body;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "stationary solver", stationary_solver},
      {2, "doeblin certificate and mixing", doeblin_mixing},
      {3, "kernel perturbation rate", kernel_perturbation},
      {4, "ergodic occupancy rate", occupancy_rate},
      {5, "coupling disagreement", coupling},
      {6, "fluid limit error", fluid_limit},
      {7, "q-table invariants", qtable_invariants},
      {8, "sampler correctness", sampler},
      {9, "ode integrator", integrator},
      {10, "learning-rate reparametrization", reparametrization},
      {11, "end-to-end reproducibility", reproducibility},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
