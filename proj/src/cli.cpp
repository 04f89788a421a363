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

#include "mgfluid/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "mgfluid/config.hpp"
#include "mgfluid/diagnostics.hpp"
#include "mgfluid/errors.hpp"
#include "mgfluid/io.hpp"
#include "mgfluid/ode.hpp"
#include "mgfluid/rng.hpp"
#include "mgfluid/simulator.hpp"
#include "mgfluid/stationary.hpp"

#ifndef MGFLUID_VERSION
#define MGFLUID_VERSION "0.0.0"
#endif

namespace mgfluid::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  int jobs = 1;
  std::vector<std::int64_t> scales;
  double horizon = 0.0;
  int reps = 0;
  std::uint64_t stride = 0;
  long steps = 0;
  std::string method;
  std::string input;
  bool dump_kernel = false;

  CLI::App* sub = nullptr;
  bool given(const char* name) const {
    const CLI::Option* opt = sub ? sub->get_option_no_throw(name) : nullptr;
    return opt && opt->count() > 0;
  }
};

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Output directory: --out, then the config, then the environment, then ./mgfluid_out.
fs::path output_dir(const Flags& f, const ExperimentConfig* cfg) {
  if (!f.out.empty()) return f.out;
  if (cfg && cfg->output_dir) return *cfg->output_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return kDefaultOutDir;
}

ExperimentConfig load_with_overrides(const Flags& f) {
  if (f.config.empty()) throw ConfigError("--config is required");
  ExperimentConfig cfg = load_config(f.config);
  RunParams& run = cfg.run;
  json& doc = cfg.document["run"];
  if (!doc.is_object()) doc = json::object();
  if (f.given("--seed")) doc["seed"] = run.seed = f.seed;
  if (f.given("--jobs")) run.jobs = f.jobs;  // not part of the hash: output does not depend on it
  if (f.given("--N")) {
    for (auto n : f.scales) {
      if (n < 1) throw ConfigError("--N values must be >= 1");
    }
    doc["N"] = run.scales = f.scales;
  }
  if (f.given("--T")) {
    if (!(f.horizon > 0.0)) throw ConfigError("--T must be positive");
    doc["T"] = run.horizon = f.horizon;
  }
  if (f.given("--reps")) {
    if (f.reps < 1) throw ConfigError("--reps must be >= 1");
    doc["reps"] = run.reps = f.reps;
  }
  if (f.given("--stride")) doc["stride"] = run.stride = f.stride;
  if (f.given("--steps")) {
    if (f.steps < 1) throw ConfigError("--steps must be >= 1");
    doc["ode_steps"] = run.ode_steps = f.steps;
  }
  if (f.given("--method")) {
    run.ode_method = parse_ode_method(f.method);
    doc["ode_method"] = f.method;
  }
  if (cfg.output_dir && !f.out.empty()) cfg.document.erase("output_dir");
  return cfg;
}

// Collects outputs and writes the manifest once everything else is on disk.
class RunRecorder {
 public:
  RunRecorder(std::string command, fs::path dir, std::string config_hash) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
    fs::remove(dir_ / io::kManifestName);
    manifest_.command = std::move(command);
    manifest_.config_hash = std::move(config_hash);
    manifest_.tool_version = MGFLUID_VERSION;
    manifest_.rng_algorithm = RngStream::kAlgorithm;
    manifest_.started_utc = io::utc_timestamp();
  }

  void emit(const std::string& name, const std::string& text) {
    io::write_text(dir_ / name, text);
    manifest_.files.emplace_back(name, io::hex64(io::fnv1a64(text)));
  }
  void emit(const std::string& name, const io::CsvWriter& csv) { emit(name, csv.str()); }
  void emit(const std::string& name, const json& doc) { emit(name, doc.dump(2) + "\n"); }

  void finish() {
    manifest_.finished_utc = io::utc_timestamp();
    io::write_manifest(dir_, manifest_);
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  io::RunManifest manifest_;
};

std::string config_hash(const ExperimentConfig& cfg) {
  return io::hex64(io::fnv1a64(cfg.document.dump()));
}

std::vector<double> worst_mixing_curve(const Eigen::MatrixXd& P, int n_max) {
  std::vector<double> worst(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    const auto curve =
        mixing_curve(P, Distribution::point_mass(static_cast<std::size_t>(P.rows()),
                                                 static_cast<std::size_t>(i)),
                     n_max);
    for (std::size_t n = 0; n < worst.size(); ++n) worst[n] = std::max(worst[n], curve[n]);
  }
  return worst;
}

std::optional<DoeblinCertificate> certificate_for(const Eigen::MatrixXd& P, const RunParams& run) {
  if (run.doeblin_k) return doeblin_minorization(P, *run.doeblin_k);
  return find_doeblin_certificate(P, 0);
}

int cmd_validate(const Flags& f, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load_with_overrides(f);
  for (const auto& w : cfg.warnings) err << "warning: " << w << "\n";

  bool ok = true;
  json doc{{"warnings", cfg.warnings}};
  json violations = json::array();
  auto report = [&](const std::string& kind, const std::string& msg) {
    out << "violation [" << kind << "]: " << msg << "\n";
    violations.push_back({{"kind", kind}, {"message", msg}});
    ok = false;
  };

  if (cfg.game) {
    const ValidationReport vr = validate_game(*cfg.game);
    for (const auto& v : vr.violations) report(v.kind, v.message);
    if (cfg.doeblin_check && vr.ok()) {
      const auto eps = cfg.min_epsilon();
      if (eps && *eps == 0.0) {
        err << "warning: doeblin check requested but epsilon = 0\n";
        report("doeblin", "epsilon = 0: no Doeblin certificate is guaranteed");
      } else {
        AssumptionProbeOptions opts;
        opts.samples = cfg.run.probe_samples;
        opts.seed = cfg.run.seed;
        const AssumptionReport ar = assumption_probe(*cfg.wrapped(), opts);
        doc["assumptions"] = io::to_json(ar);
        if (!ar.certificate) {
          report("doeblin", "no Doeblin certificate for the limit kernel at X0");
        } else {
          out << "doeblin certificate: k = " << ar.certificate->k
              << ", c = " << io::format_double(ar.certificate->c) << "\n";
        }
        for (const auto& v : ar.violations) {
          if (ar.certificate || v.find("Doeblin") == std::string::npos) {
            err << "warning: " << v << "\n";
          }
        }
      }
    }
  } else {
    try {
      check_row_stochastic(*cfg.matrix);
      if (cfg.doeblin_check) {
        const auto cert = certificate_for(*cfg.matrix, cfg.run);
        if (!cert) {
          report("doeblin", "no Doeblin certificate found");
        } else {
          doc["certificate"] = io::to_json(*cert);
        }
      }
    } catch (const StructuralError& e) {
      report("row_sum", e.what());
    }
  }
  doc["valid"] = ok;
  doc["violations"] = violations;

  RunRecorder rec("validate", output_dir(f, &cfg), config_hash(cfg));
  rec.emit("validate.json", doc);
  rec.finish();
  out << (ok ? "valid" : "invalid") << "\n";
  return ok ? kOk : kError;
}

int cmd_stationary(const Flags& f, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load_with_overrides(f);
  for (const auto& w : cfg.warnings) err << "warning: " << w << "\n";

  Eigen::MatrixXd P;
  std::shared_ptr<const WrappedGame> w;
  Scale scale = Scale::infinite();
  if (cfg.game) {
    w = cfg.wrapped();
    if (f.given("--N")) scale = Scale::finite(cfg.run.scales.front());
    P = transition_matrix(*w, w->initial_params(), scale);
  } else {
    P = *cfg.matrix;
    check_row_stochastic(P);
  }
  const Distribution mu = stationary_distribution(P);
  const auto cert = certificate_for(P, cfg.run);
  const auto curve = worst_mixing_curve(P, cfg.run.n_max);

  RunRecorder rec("stationary", output_dir(f, &cfg), config_hash(cfg));
  rec.emit("stationary.csv", io::stationary_csv(mu, w.get()));
  rec.emit("mixing.csv", io::mixing_csv(curve, cert ? &*cert : nullptr));
  if (f.dump_kernel) rec.emit("kernel.csv", w ? io::kernel_csv(*w, P) : io::matrix_csv(P));
  rec.emit("stationary.json",
           json{{"scale", scale.to_string()},
                {"size", P.rows()},
                {"residual", stationary_residual(P, mu)},
                {"spectral_gap", spectral_gap_estimate(P)},
                {"certificate", cert ? io::to_json(*cert) : json(nullptr)},
                {"stationary", mu.vector()}});
  rec.finish();

  for (std::size_t i = 0; i < mu.size(); ++i) {
    out << (w ? triple_label(*w, i) : std::to_string(i)) << " " << io::format_double(mu[i])
        << "\n";
  }
  return kOk;
}

int cmd_ode(const Flags& f, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load_with_overrides(f);
  for (const auto& w : cfg.warnings) err << "warning: " << w << "\n";
  const auto w = cfg.wrapped();
  const long steps = cfg.run.ode_steps > 0 ? cfg.run.ode_steps : 1000;
  DriftField field(w);
  const OdeTrajectory traj =
      integrate(field, w->initial_params(), cfg.run.horizon, steps, cfg.run.ode_method);
  for (const auto& msg : traj.warnings) err << "warning: " << msg << "\n";

  RunRecorder rec("ode", output_dir(f, &cfg), config_hash(cfg));
  rec.emit("ode.csv", io::ode_csv(traj));
  rec.emit("ode.json", json{{"method", to_string(traj.method)},
                            {"horizon", traj.horizon},
                            {"steps", traj.steps},
                            {"max_sup_norm", traj.max_sup_norm},
                            {"left_ball", traj.left_ball},
                            {"wall_seconds", traj.wall_seconds},
                            {"warnings", traj.warnings},
                            {"final", traj.y.back()}});
  rec.finish();
  out << "ode " << to_string(traj.method) << " K = " << steps << " T = "
      << io::format_double(traj.horizon) << " written to " << rec.dir().string() << "\n";
  return kOk;
}

int cmd_simulate(const Flags& f, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load_with_overrides(f);
  for (const auto& w : cfg.warnings) err << "warning: " << w << "\n";
  const auto w = cfg.wrapped();
  const std::int64_t n = cfg.run.scales.front();
  const TrajectoryRecord traj = sample_trajectory(*w, w->initial_params(), Scale::finite(n),
                                                  cfg.run.horizon, cfg.run.seed, cfg.run.stride);

  RunRecorder rec("simulate", output_dir(f, &cfg), config_hash(cfg));
  rec.emit("trajectory.csv", io::trajectory_csv(*w, traj));
  rec.emit("simulate.json", json{{"N", traj.scale},
                                 {"T", traj.horizon},
                                 {"seed", traj.seed},
                                 {"steps", traj.steps},
                                 {"stride", traj.stride},
                                 {"rng", traj.rng_id},
                                 {"uniforms_consumed", traj.uniforms_consumed},
                                 {"cumulative_reward", traj.cumulative_reward},
                                 {"final_state", traj.snapshots.back().g},
                                 {"final_params", traj.snapshots.back().x}});
  rec.finish();
  out << "simulated N = " << n << " steps = " << traj.steps << " seed = " << traj.seed << "\n";
  return kOk;
}

int cmd_couple(const Flags& f, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load_with_overrides(f);
  for (const auto& w : cfg.warnings) err << "warning: " << w << "\n";
  const auto w = cfg.wrapped();
  const std::int64_t n = cfg.run.scales.front();
  const CoupledRecord c =
      sample_coupled(*w, w->initial_params(), Scale::finite(n), cfg.run.horizon, cfg.run.seed);
  std::size_t disagree = 0;
  for (auto e : c.equal) disagree += e ? 0 : 1;

  RunRecorder rec("couple", output_dir(f, &cfg), config_hash(cfg));
  rec.emit("coupled.csv", io::coupled_csv(c));
  rec.emit("couple.json",
           json{{"N", c.scale},
                {"T", c.horizon},
                {"seed", c.seed},
                {"steps", c.steps},
                {"uniforms_consumed", c.uniforms_consumed},
                {"disagreements", disagree},
                {"first_disagreement",
                 c.first_disagreement ? json(*c.first_disagreement) : json(nullptr)}});
  rec.finish();
  out << "coupled N = " << n << " disagreements = " << disagree << " of " << c.equal.size()
      << "\n";
  return kOk;
}

int cmd_compare(const Flags& f, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load_with_overrides(f);
  for (const auto& w : cfg.warnings) err << "warning: " << w << "\n";
  const auto w = cfg.wrapped();
  const ParamPoint x0 = w->initial_params();

  std::vector<std::int64_t> scales = cfg.run.scales;
  std::sort(scales.begin(), scales.end());
  scales.erase(std::unique(scales.begin(), scales.end()), scales.end());

  RunRecorder rec("compare", output_dir(f, &cfg), config_hash(cfg));
  std::vector<ComparisonReport> reports;
  for (std::int64_t n : scales) {
    McOptions opts;
    opts.jobs = cfg.run.jobs;
    opts.stride = cfg.run.stride;
    opts.ode_steps = cfg.run.ode_steps;
    ComparisonReport r = mc_sup_error(*w, x0, Scale::finite(n), cfg.run.horizon, cfg.run.reps,
                                      cfg.run.seed, opts);
    rec.emit("compare_N" + std::to_string(n) + ".csv", io::comparison_csv(r));
    out << "N = " << n << " mean = " << io::format_double(r.mean)
        << " se = " << io::format_double(r.std_error) << "\n";
    reports.push_back(std::move(r));
  }
  rec.emit("rate.csv", io::rate_points_csv(reports));

  json fit_doc = nullptr;
  std::vector<RatePoint> points;
  for (const auto& r : reports) points.push_back({static_cast<double>(r.scale), r.mean});
  try {
    const RateFit fit = rate_fit(points);
    fit_doc = io::to_json(fit);
    out << "slope = " << io::format_double(fit.slope) << "\n";
  } catch (const FitError& e) {
    err << "warning: no rate fit: " << e.what() << "\n";
  }

  const AcceptanceThresholds& th = cfg.acceptance;
  bool passed = true;
  json checks = json::array();
  auto check = [&](const std::string& name, bool ok) {
    checks.push_back({{"check", name}, {"passed", ok}});
    out << (ok ? "PASS " : "FAIL ") << name << "\n";
    passed = passed && ok;
  };
  if (th.max_final_error) {
    check("max_final_error", reports.back().mean <= *th.max_final_error);
  }
  if (th.monotone_decrease) {
    bool ok = true;
    for (std::size_t i = 1; i < reports.size(); ++i) ok = ok && reports[i].mean < reports[i - 1].mean;
    check("monotone_decrease", ok);
  }
  if (th.min_improvement_factor) {
    const double first = reports.front().mean, last = reports.back().mean;
    const double factor = last > 0.0 ? first / last : std::numeric_limits<double>::infinity();
    check("min_improvement_factor", reports.size() > 1 && factor >= *th.min_improvement_factor);
  }

  json reps = json::array();
  for (const auto& r : reports) reps.push_back(io::to_json(r));
  rec.emit("compare_summary.json",
           json{{"reports", reps},
                {"fit", fit_doc},
                {"acceptance",
                 {{"max_final_error", nullable(th.max_final_error)},
                  {"monotone_decrease", th.monotone_decrease},
                  {"min_improvement_factor", nullable(th.min_improvement_factor)},
                  {"checks", checks},
                  {"passed", passed}}}});
  rec.finish();
  return passed ? kOk : kThresholdFailed;
}

int cmd_rate(const Flags& f, std::ostream& out, std::ostream& err) {
  if (f.input.empty()) throw ConfigError("rate needs --input CSV");
  std::optional<ExperimentConfig> cfg;
  if (!f.config.empty()) cfg = load_with_overrides(f);
  const auto points = io::read_rate_points(f.input);
  const RateFit fit = rate_fit(points);
  for (const auto& msg : fit.warnings) err << "warning: " << msg << "\n";

  const std::string hash =
      cfg ? config_hash(*cfg) : io::hex64(io::fnv1a64(io::read_text(f.input)));
  RunRecorder rec("rate", output_dir(f, cfg ? &*cfg : nullptr), hash);
  rec.emit("rate_fit.json", io::to_json(fit));
  rec.finish();
  out << "slope = " << io::format_double(fit.slope)
      << " intercept = " << io::format_double(fit.intercept)
      << " residual = " << io::format_double(fit.residual) << "\n";
  return kOk;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "experiment config (JSON)");
  sub->add_option("--seed", f.seed, "base seed");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Fluid limits of reinforcement learners in Markov games", "mgfluid");
  app.set_version_flag("--version", MGFLUID_VERSION);
  app.require_subcommand(1);

  Flags f;
  using Handler = int (*)(const Flags&, std::ostream&, std::ostream&);
  std::vector<std::pair<CLI::App*, Handler>> commands;

  auto* validate = app.add_subcommand("validate", "check a game and its Doeblin condition");
  add_common(validate, f);
  commands.emplace_back(validate, &cmd_validate);

  auto* stationary = app.add_subcommand("stationary", "invariant law and mixing curve");
  add_common(stationary, f);
  stationary->add_option("--N", f.scales, "finite scale (default: limit kernel)")->expected(1);
  stationary->add_flag("--dump-kernel", f.dump_kernel, "also write the kernel matrix");
  commands.emplace_back(stationary, &cmd_stationary);

  auto* ode = app.add_subcommand("ode", "integrate the limit ODE");
  add_common(ode, f);
  ode->add_option("--T", f.horizon, "horizon");
  ode->add_option("--steps", f.steps, "number of steps");
  ode->add_option("--method", f.method, "euler or rk4");
  commands.emplace_back(ode, &cmd_ode);

  auto* simulate = app.add_subcommand("simulate", "one stochastic trajectory");
  add_common(simulate, f);
  simulate->add_option("--N", f.scales, "scale")->expected(1);
  simulate->add_option("--T", f.horizon, "horizon");
  simulate->add_option("--stride", f.stride, "snapshot stride");
  commands.emplace_back(simulate, &cmd_simulate);

  auto* couple = app.add_subcommand("couple", "live and frozen chains on shared uniforms");
  add_common(couple, f);
  couple->add_option("--N", f.scales, "scale")->expected(1);
  couple->add_option("--T", f.horizon, "horizon");
  commands.emplace_back(couple, &cmd_couple);

  auto* compare = app.add_subcommand("compare", "Monte Carlo sup-error against the ODE");
  add_common(compare, f);
  compare->add_option("--N", f.scales, "scales")->expected(1, 64);
  compare->add_option("--T", f.horizon, "horizon");
  compare->add_option("--reps", f.reps, "replications per scale");
  compare->add_option("--stride", f.stride, "snapshot stride");
  compare->add_option("--steps", f.steps, "RK4 reference steps");
  commands.emplace_back(compare, &cmd_compare);

  auto* rate = app.add_subcommand("rate", "log-log slope of error against N");
  add_common(rate, f);
  rate->add_option("--input", f.input, "CSV with columns N and error or mean_error")->required();
  commands.emplace_back(rate, &cmd_rate);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  for (const auto& [sub, handler] : commands) {
    if (!sub->parsed()) continue;
    f.sub = sub;
    try {
      return handler(f, out, err);
    } catch (const CLI::Error& e) {
      err << "error: " << e.what() << "\n";
      return kUsage;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kError;
    }
  }
  return kUsage;
}

}  // namespace mgfluid::cli
