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

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <sstream>

#include "json.hpp"

#include "mgfluid/cli.hpp"
#include "mgfluid/config.hpp"
#include "mgfluid/diagnostics.hpp"
#include "mgfluid/errors.hpp"
#include "mgfluid/ode.hpp"
#include "mgfluid/simulator.hpp"
#include "mgfluid/stationary.hpp"
#include "mgfluid/wrapped.hpp"

namespace py = pybind11;
using namespace mgfluid;

namespace {

using WrappedPtr = std::shared_ptr<WrappedGame>;

WrappedPtr unconst(std::shared_ptr<const WrappedGame> w) { return std::const_pointer_cast<WrappedGame>(w); }

// None selects the N = infinity kernel.
Scale to_scale(std::optional<std::int64_t> n) {
  return n ? Scale::finite(*n) : Scale::infinite();
}

py::dict certificate_dict(const DoeblinCertificate& c) {
  py::dict d;
  d["k"] = c.k;
  d["c"] = c.c;
  d["q"] = c.q.vector();
  return d;
}

py::object maybe_certificate(const std::optional<DoeblinCertificate>& c) {
  if (!c) return py::none();
  return certificate_dict(*c);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Q-learning Markov games and their fluid limit";
  m.attr("__version__") = MGFLUID_VERSION;

  py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<ErgodicityError>(m, "ErgodicityError", PyExc_RuntimeError);
  py::register_exception<DriftEvaluationError>(m, "DriftEvaluationError", PyExc_RuntimeError);
  py::register_exception<FitError>(m, "FitError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_RuntimeError);

  py::class_<WrappedGame, WrappedPtr>(m, "WrappedGame")
      .def_property_readonly("size", &WrappedGame::size)
      .def_property_readonly("dimension", &WrappedGame::dimension)
      .def_property_readonly("num_players", &WrappedGame::num_players)
      .def_property_readonly("num_states", &WrappedGame::num_states)
      .def_property_readonly("parameter_radius", &WrappedGame::parameter_radius)
      .def("initial_params", &WrappedGame::initial_params)
      .def("decode",
           [](const WrappedGame& w, std::size_t g) {
             const auto t = w.decode(g);
             return py::make_tuple(t.s_current, t.action, t.s_next);
           })
      .def("label", [](const WrappedGame& w, std::size_t g) { return triple_label(w, g); })
      .def("increment",
           [](const WrappedGame& w, const ParamPoint& x, std::size_t g) { return w.increment(x, g); })
      .def("joint_policy",
           [](const WrappedGame& w, const ParamPoint& x, int s) { return w.joint_policy(x, s); });

  m.def("load_config",
        [](const std::filesystem::path& path) { return unconst(load_config(path).wrapped()); },
        py::arg("path"), "Wrapped game described by a JSON config file.");
  m.def("parse_config",
        [](const std::string& text) {
          return unconst(parse_config(nlohmann::json::parse(text)).wrapped());
        },
        py::arg("text"), "Wrapped game from JSON config text.");

  m.def("transition_matrix",
        [](const WrappedGame& w, const ParamPoint& x, std::optional<std::int64_t> n) {
          return transition_matrix(w, x, to_scale(n));
        },
        py::arg("w"), py::arg("x"), py::arg("N") = py::none());
  m.def("initial_distribution",
        [](const WrappedGame& w, const ParamPoint& x) {
          return initial_wrapped_distribution(w, x).vector();
        },
        py::arg("w"), py::arg("x"));

  m.def("stationary_distribution",
        [](const Eigen::MatrixXd& P) { return stationary_distribution(P).vector(); },
        py::arg("P"));
  m.def("power_iteration_stationary",
        [](const Eigen::MatrixXd& P) { return power_iteration_stationary(P).vector(); },
        py::arg("P"));
  m.def("stationary_residual",
        [](const Eigen::MatrixXd& P, const std::vector<double>& mu) {
          return stationary_residual(P, Distribution(mu));
        },
        py::arg("P"), py::arg("mu"));
  m.def("doeblin_certificate",
        [](const Eigen::MatrixXd& P, std::optional<int> k) {
          return maybe_certificate(k ? doeblin_minorization(P, *k) : find_doeblin_certificate(P));
        },
        py::arg("P"), py::arg("k") = py::none(),
        "Dict with k, c, q, or None when no minorization exists.");
  m.def("mixing_curve",
        [](const Eigen::MatrixXd& P, const std::vector<double>& mu0, int n_max) {
          return mixing_curve(P, Distribution(mu0), n_max);
        },
        py::arg("P"), py::arg("mu0"), py::arg("n_max"));

  m.def("beta",
        [](const WrappedGame& w, const ParamPoint& x, std::optional<std::int64_t> n) {
          return beta(w, x, to_scale(n));
        },
        py::arg("w"), py::arg("x"), py::arg("N") = py::none());
  m.def("beta_gap",
        [](const WrappedGame& w, const ParamPoint& x, std::int64_t n) {
          return beta_gap(w, x, Scale::finite(n));
        },
        py::arg("w"), py::arg("x"), py::arg("N"));
  m.def("wrapped_stationary",
        [](const WrappedGame& w, const ParamPoint& x, std::optional<std::int64_t> n) {
          return wrapped_stationary(w, x, to_scale(n)).vector();
        },
        py::arg("w"), py::arg("x"), py::arg("N") = py::none());

  m.def("integrate",
        [](WrappedPtr w, const ParamPoint& x0, double horizon, long steps,
           const std::string& method) {
          DriftField field(std::move(w));
          const auto tr = integrate(field, x0, horizon, steps, parse_ode_method(method));
          return py::make_tuple(tr.t, tr.y);
        },
        py::arg("w"), py::arg("x0"), py::arg("T"), py::arg("K"), py::arg("method") = "rk4",
        "Returns (t, y) on the uniform grid.");
  m.def("integrate_field",
        [](const std::function<std::vector<double>(std::vector<double>)>& f,
           const std::vector<double>& x0, double horizon, long steps, const std::string& method) {
          const DriftFn drift = [&](std::span<const double> x, std::span<double> out) {
            const auto v = f(std::vector<double>(x.begin(), x.end()));
            if (v.size() != out.size()) throw StructuralError("drift returned the wrong length");
            std::copy(v.begin(), v.end(), out.begin());
          };
          const auto tr = integrate(drift, x0, horizon, steps, parse_ode_method(method));
          return py::make_tuple(tr.t, tr.y);
        },
        py::arg("f"), py::arg("x0"), py::arg("T"), py::arg("K"), py::arg("method") = "rk4");

  py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
      .def_readonly("N", &TrajectoryRecord::scale)
      .def_readonly("T", &TrajectoryRecord::horizon)
      .def_readonly("seed", &TrajectoryRecord::seed)
      .def_readonly("steps", &TrajectoryRecord::steps)
      .def_readonly("stride", &TrajectoryRecord::stride)
      .def_readonly("uniforms_consumed", &TrajectoryRecord::uniforms_consumed)
      .def_readonly("cumulative_reward", &TrajectoryRecord::cumulative_reward)
      .def_property_readonly("n", [](const TrajectoryRecord& r) {
        std::vector<std::uint64_t> v;
        for (const auto& s : r.snapshots) v.push_back(s.n);
        return v;
      })
      .def_property_readonly("g", [](const TrajectoryRecord& r) {
        std::vector<std::size_t> v;
        for (const auto& s : r.snapshots) v.push_back(s.g);
        return v;
      })
      .def_property_readonly("x", [](const TrajectoryRecord& r) {
        std::vector<ParamPoint> v;
        for (const auto& s : r.snapshots) v.push_back(s.x);
        return v;
      });

  m.def("sample_trajectory",
        [](const WrappedGame& w, const ParamPoint& x0, std::int64_t n, double horizon,
           std::uint64_t seed, std::uint64_t stride) {
          py::gil_scoped_release release;
          return sample_trajectory(w, x0, Scale::finite(n), horizon, seed, stride);
        },
        py::arg("w"), py::arg("x0"), py::arg("N"), py::arg("T"), py::arg("seed"),
        py::arg("stride") = 0);
  m.def("coupled_disagreement",
        [](const WrappedGame& w, const ParamPoint& x0, std::int64_t n, double horizon,
           std::uint64_t seed) {
          const auto rec = sample_coupled(w, x0, Scale::finite(n), horizon, seed);
          std::vector<bool> v;
          for (auto e : rec.equal) v.push_back(e == 0);
          return v;
        },
        py::arg("w"), py::arg("x0"), py::arg("N"), py::arg("T"), py::arg("seed"),
        "Per-step indicator that the live and frozen chains disagree.");
  m.def("occupancy_error",
        [](const WrappedGame& w, const ParamPoint& x, std::size_t g, std::uint64_t steps,
           std::uint64_t seed) { return occupancy_error(w, x, g, steps, seed); },
        py::arg("w"), py::arg("x"), py::arg("g_target"), py::arg("n_steps"), py::arg("seed"));

  py::class_<ComparisonReport>(m, "ComparisonReport")
      .def_readonly("N", &ComparisonReport::scale)
      .def_readonly("T", &ComparisonReport::horizon)
      .def_readonly("reps", &ComparisonReport::reps)
      .def_readonly("ode_steps", &ComparisonReport::ode_steps)
      .def_readonly("errors", &ComparisonReport::errors)
      .def_readonly("mean", &ComparisonReport::mean)
      .def_readonly("std_error", &ComparisonReport::std_error)
      .def_readonly("min", &ComparisonReport::min)
      .def_readonly("max", &ComparisonReport::max);

  m.def("mc_sup_error",
        [](const WrappedGame& w, const ParamPoint& x0, std::int64_t n, double horizon, int reps,
           std::uint64_t base_seed, int jobs) {
          py::gil_scoped_release release;
          McOptions opts;
          opts.jobs = jobs;
          return mc_sup_error(w, x0, Scale::finite(n), horizon, reps, base_seed, opts);
        },
        py::arg("w"), py::arg("x0"), py::arg("N"), py::arg("T"), py::arg("reps"),
        py::arg("base_seed") = 1, py::arg("jobs") = 1);
  m.def("rate_fit",
        [](const std::vector<double>& ns, const std::vector<double>& errors) {
          if (ns.size() != errors.size()) throw StructuralError("N and error lists differ in length");
          std::vector<RatePoint> pts;
          for (std::size_t i = 0; i < ns.size(); ++i) pts.push_back({ns[i], errors[i]});
          const auto fit = rate_fit(pts);
          py::dict d;
          d["slope"] = fit.slope;
          d["intercept"] = fit.intercept;
          d["residual"] = fit.residual;
          d["warnings"] = fit.warnings;
          return d;
        },
        py::arg("N"), py::arg("errors"));

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = cli::run(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a CLI subcommand; returns (exit_code, stdout, stderr).");
}
