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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "mgfluid/diagnostics.hpp"
#include "mgfluid/ode.hpp"
#include "mgfluid/simulator.hpp"
#include "mgfluid/stationary.hpp"
#include "mgfluid/wrapped.hpp"

namespace mgfluid::io {

// Shortest round-trip decimal form, '.' separator.
std::string format_double(double v);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);
std::string file_checksum(const std::filesystem::path& path);

// Comma-separated rows with LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<std::string>& cells);
  const std::string& str() const { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string text_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Exports. Column layouts are documented in docs/formats.md.
CsvWriter kernel_csv(const WrappedGame& w, const Eigen::MatrixXd& P);
CsvWriter matrix_csv(const Eigen::MatrixXd& P);
CsvWriter stationary_csv(const Distribution& mu, const WrappedGame* w = nullptr);
CsvWriter mixing_csv(const std::vector<double>& curve, const DoeblinCertificate* cert);
CsvWriter ode_csv(const OdeTrajectory& traj);
CsvWriter trajectory_csv(const WrappedGame& w, const TrajectoryRecord& traj);
CsvWriter coupled_csv(const CoupledRecord& rec);
CsvWriter comparison_csv(const ComparisonReport& report);
CsvWriter rate_points_csv(const std::vector<ComparisonReport>& reports);

nlohmann::json to_json(const DoeblinCertificate& cert);
nlohmann::json to_json(const ComparisonReport& report);
nlohmann::json to_json(const RateFit& fit);
nlohmann::json to_json(const AssumptionReport& report);

// Reads (N, error) pairs from a CSV with a header. The error column is
// "error" if present, else "mean_error".
std::vector<RatePoint> read_rate_points(const std::filesystem::path& path);

// Manifest written last by every CLI run; its presence marks completion.
struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string tool_version;
  std::string rng_algorithm;
  std::string started_utc;
  std::string finished_utc;
  std::vector<std::pair<std::string, std::string>> files;  // name, checksum
};

inline constexpr const char* kManifestName = "manifest.json";

std::string utc_timestamp();
void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

}  // namespace mgfluid::io
