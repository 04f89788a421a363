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

#include "mgfluid/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iterator>
#include <sstream>

#include "mgfluid/errors.hpp"
#include "mgfluid/rng.hpp"

namespace mgfluid::io {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::string file_checksum(const std::filesystem::path& path) {
  return hex64(fnv1a64(read_text(path)));
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  row(header);
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) {
    throw std::logic_error("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(columns_));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
  return *this;
}

void CsvWriter::save(const std::filesystem::path& path) const { write_text(path, text_); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

CsvWriter kernel_csv(const WrappedGame& w, const Eigen::MatrixXd& P) {
  std::vector<std::string> header{"from"};
  for (std::size_t g = 0; g < w.size(); ++g) header.push_back(triple_label(w, g));
  CsvWriter csv(header);
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    std::vector<std::string> cells{triple_label(w, static_cast<std::size_t>(i))};
    for (Eigen::Index j = 0; j < P.cols(); ++j) cells.push_back(format_double(P(i, j)));
    csv.row(cells);
  }
  return csv;
}

CsvWriter matrix_csv(const Eigen::MatrixXd& P) {
  std::vector<std::string> header{"from"};
  for (Eigen::Index j = 0; j < P.cols(); ++j) header.push_back(std::to_string(j));
  CsvWriter csv(header);
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    std::vector<std::string> cells{std::to_string(i)};
    for (Eigen::Index j = 0; j < P.cols(); ++j) cells.push_back(format_double(P(i, j)));
    csv.row(cells);
  }
  return csv;
}

CsvWriter stationary_csv(const Distribution& mu, const WrappedGame* w) {
  CsvWriter csv({"index", "label", "probability"});
  for (std::size_t i = 0; i < mu.size(); ++i) {
    csv.row({std::to_string(i), w ? triple_label(*w, i) : std::to_string(i),
             format_double(mu[i])});
  }
  return csv;
}

CsvWriter mixing_csv(const std::vector<double>& curve, const DoeblinCertificate* cert) {
  CsvWriter csv({"n", "tv", "bound"});
  for (std::size_t n = 0; n < curve.size(); ++n) {
    csv.row({std::to_string(n), format_double(curve[n]),
             cert ? format_double(doeblin_bound(*cert, static_cast<int>(n))) : "nan"});
  }
  return csv;
}

CsvWriter ode_csv(const OdeTrajectory& traj) {
  std::vector<std::string> header{"t"};
  for (std::size_t k = 0; k < traj.dimension(); ++k) header.push_back("y_" + std::to_string(k + 1));
  CsvWriter csv(header);
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    std::vector<std::string> cells{format_double(traj.t[i])};
    for (double v : traj.y[i]) cells.push_back(format_double(v));
    csv.row(cells);
  }
  return csv;
}

CsvWriter trajectory_csv(const WrappedGame& w, const TrajectoryRecord& traj) {
  std::vector<std::string> header{"n", "t", "g", "s_current", "action", "s_next"};
  for (int k = 0; k < w.dimension(); ++k) header.push_back("x_" + std::to_string(k + 1));
  CsvWriter csv(header);
  for (const Snapshot& s : traj.snapshots) {
    const WrappedTriple t = w.decode(s.g);
    std::vector<std::string> cells{
        std::to_string(s.n),
        format_double(static_cast<double>(s.n) / static_cast<double>(traj.scale)),
        std::to_string(s.g), std::to_string(t.s_current), std::to_string(t.action),
        std::to_string(t.s_next)};
    for (double v : s.x) cells.push_back(format_double(v));
    csv.row(cells);
  }
  return csv;
}

CsvWriter coupled_csv(const CoupledRecord& rec) {
  CsvWriter csv({"n", "live", "frozen", "disagree"});
  for (std::size_t n = 0; n < rec.live.size(); ++n) {
    csv.row({std::to_string(n), std::to_string(rec.live[n]), std::to_string(rec.frozen[n]),
             rec.equal[n] ? "0" : "1"});
  }
  return csv;
}

CsvWriter comparison_csv(const ComparisonReport& report) {
  CsvWriter csv({"rep", "seed", "sup_error"});
  for (std::size_t r = 0; r < report.errors.size(); ++r) {
    csv.row({std::to_string(r), std::to_string(report.base_seed + r),
             format_double(report.errors[r])});
  }
  return csv;
}

CsvWriter rate_points_csv(const std::vector<ComparisonReport>& reports) {
  CsvWriter csv({"N", "reps", "mean_error", "std_error", "min_error", "max_error", "ode_steps"});
  for (const auto& r : reports) {
    csv.row({std::to_string(r.scale), std::to_string(r.reps), format_double(r.mean),
             format_double(r.std_error), format_double(r.min), format_double(r.max),
             std::to_string(r.ode_steps)});
  }
  return csv;
}

json to_json(const DoeblinCertificate& cert) {
  return json{{"k", cert.k}, {"c", cert.c}, {"q", cert.q.vector()}};
}

json to_json(const ComparisonReport& report) {
  return json{{"N", report.scale},         {"T", report.horizon},
              {"reps", report.reps},       {"base_seed", report.base_seed},
              {"stride", report.stride},   {"ode_steps", report.ode_steps},
              {"mean", report.mean},       {"std_error", report.std_error},
              {"min", report.min},         {"max", report.max}};
}

json to_json(const RateFit& fit) {
  json pts = json::array();
  for (const auto& p : fit.points) pts.push_back({p.n, p.error});
  return json{{"slope", fit.slope},
              {"intercept", fit.intercept},
              {"residual", fit.residual},
              {"points", pts},
              {"warnings", fit.warnings}};
}

json to_json(const AssumptionReport& r) {
  json by_scale = json::array();
  for (const auto& [n, l] : r.kernel_lipschitz_by_scale) by_scale.push_back({{"N", n}, {"L", l}});
  json out{{"ball_radius", r.ball_radius},
           {"probe_radius", r.probe_radius},
           {"x0_in_ball", r.x0_in_ball},
           {"policy_lipschitz", r.policy_lipschitz},
           {"kernel_lipschitz", r.kernel_lipschitz},
           {"kernel_lipschitz_by_scale", by_scale},
           {"stationary_lipschitz", r.stationary_lipschitz},
           {"drift_lipschitz", r.drift_lipschitz},
           {"kappa", r.kappa},
           {"violations", r.violations}};
  out["certificate"] = r.certificate ? to_json(*r.certificate) : json(nullptr);
  out["minorization_floor"] = r.minorization_floor ? json(*r.minorization_floor) : json(nullptr);
  return out;
}

std::vector<RatePoint> read_rate_points(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("rate input " + path.string() + " is empty");
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      cells.push_back(cell);
    }
    return cells;
  };
  const auto header = split(line);
  int n_col = -1, e_col = -1, mean_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "N") n_col = static_cast<int>(i);
    if (header[i] == "error") e_col = static_cast<int>(i);
    if (header[i] == "mean_error") mean_col = static_cast<int>(i);
  }
  if (e_col < 0) e_col = mean_col;
  if (n_col < 0 || e_col < 0) {
    throw ConfigError("rate input needs columns N and error (or mean_error)");
  }
  std::vector<RatePoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (static_cast<int>(cells.size()) <= std::max(n_col, e_col)) {
      throw ConfigError("short row in rate input: " + line);
    }
    try {
      points.push_back({std::stod(cells[n_col]), std::stod(cells[e_col])});
    } catch (const std::exception&) {
      throw ConfigError("unparsable row in rate input: " + line);
    }
  }
  return points;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  json files = json::array();
  for (const auto& [name, sum] : m.files) files.push_back({{"file", name}, {"fnv1a64", sum}});
  const json doc{{"command", m.command},
                 {"config_hash", m.config_hash},
                 {"tool_version", m.tool_version},
                 {"rng_algorithm", m.rng_algorithm},
                 {"started_utc", m.started_utc},
                 {"finished_utc", m.finished_utc},
                 {"files", files}};
  write_text(dir / kManifestName, doc.dump(2) + "\n");
}

}  // namespace mgfluid::io
