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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "json.hpp"

#include "mgfluid/cli.hpp"
#include "mgfluid/config.hpp"
#include "mgfluid/errors.hpp"
#include "mgfluid/io.hpp"

using namespace mgfluid;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mgfluid_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

json canonical() {
  return json::parse(io::read_text(fs::path(MGFLUID_CONFIG_DIR) / "canonical_2p.json"));
}

fs::path write_config(const fs::path& dir, const json& doc, const std::string& name = "c.json") {
  io::write_text(dir / name, doc.dump(2));
  return dir / name;
}

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config(canonical());
  REQUIRE(cfg.game);
  CHECK(cfg.game->num_players() == 2);
  CHECK(cfg.reinforcers.size() == 2);
  CHECK(cfg.run.scales == std::vector<std::int64_t>{100, 1000, 10000});
  CHECK(cfg.run.reps == 100);
  CHECK(cfg.min_epsilon().value() == doctest::Approx(0.1));
  CHECK(cfg.acceptance.monotone_decrease);
  CHECK(cfg.wrapped()->size() == 16);

  auto bad = canonical();
  bad["run"]["N"] = json::array({0});
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = canonical();
  bad["run"]["T"] = -1.0;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = canonical();
  bad["game"]["transition"][0].erase(0);
  CHECK_THROWS_AS(parse_config(bad), StructuralError);
  bad = canonical();
  bad.erase("reinforcers");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = canonical();
  bad["reinforcers"][0]["type"] = "sarsa";
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("game file and json round trip") {
  const auto dir = scratch("gamefile");
  auto doc = canonical();
  io::write_text(dir / "game.json", doc["game"].dump());
  doc.erase("game");
  doc["game_file"] = "game.json";
  const auto path = write_config(dir, doc);
  const auto cfg = load_config(path);
  REQUIRE(cfg.game);
  const auto again = parse_game(game_to_json(*cfg.game));
  CHECK(again.transition_tensor() == cfg.game->transition_tensor());
  CHECK(again.reward_tensors() == cfg.game->reward_tensors());
  CHECK(cfg.document.contains("game"));
}

TEST_CASE("explicit initial table") {
  auto doc = canonical();
  doc["reinforcers"][0]["x0"] = json::array({json::array({1.0, 2.0}), json::array({3.0, 4.0})});
  const auto cfg = parse_config(doc);
  CHECK(cfg.wrapped()->initial_params() ==
        std::vector<double>{1, 2, 3, 4, 1, 2, 3, 4});
  doc["reinforcers"][0]["x0"] = json::array({json::array({1.0, 2.0})});
  CHECK_THROWS_AS(parse_config(doc), StructuralError);
}

TEST_CASE("validate") {
  const auto dir = scratch("validate");
  auto ok = run({"validate", "--config", write_config(dir, canonical()).string(), "--out",
                 (dir / "o1").string()});
  CHECK(ok.code == cli::kOk);
  CHECK(ok.out.find("valid") != std::string::npos);
  CHECK(fs::exists(dir / "o1" / "manifest.json"));

  auto doc = canonical();
  doc["game"]["transition"][0][0] = json::array({0.6, 0.3});
  auto bad = run({"validate", "--config", write_config(dir, doc, "bad.json").string(), "--out",
                  (dir / "o2").string()});
  CHECK(bad.code == cli::kError);
  CHECK(bad.out.find("row sum 0.9 at (s=0, a=0)") != std::string::npos);

  doc = canonical();
  doc["reinforcers"][0]["epsilon"] = 0.0;
  auto eps0 = run({"validate", "--config", write_config(dir, doc, "eps0.json").string(), "--out",
                   (dir / "o3").string()});
  CHECK(eps0.code == cli::kError);
  CHECK(eps0.err.find("warning") != std::string::npos);

  doc["doeblin_check"] = false;
  auto nocheck = run({"validate", "--config", write_config(dir, doc, "eps0b.json").string(),
                      "--out", (dir / "o4").string()});
  CHECK(nocheck.code == cli::kOk);
}

TEST_CASE("stationary on the 2x2 matrix") {
  const auto dir = scratch("stationary");
  const auto r = run({"stationary", "--config",
                      (fs::path(MGFLUID_CONFIG_DIR) / "stationary_2x2.json").string(), "--out",
                      dir.string()});
  REQUIRE(r.code == cli::kOk);
  const auto rows = lines(io::read_text(dir / "stationary.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "index,label,probability");
  const double p0 = std::stod(rows[1].substr(rows[1].rfind(',') + 1));
  const double p1 = std::stod(rows[2].substr(rows[2].rfind(',') + 1));
  CHECK(std::abs(p0 - 5.0 / 6.0) < 1e-14);
  CHECK(std::abs(p1 - 1.0 / 6.0) < 1e-14);
  const auto summary = json::parse(io::read_text(dir / "stationary.json"));
  CHECK(summary["certificate"]["k"] == 1);
  CHECK(summary["certificate"]["c"].get<double>() == doctest::Approx(0.6));
  const auto mixing = lines(io::read_text(dir / "mixing.csv"));
  CHECK(mixing[0] == "n,tv,bound");
  CHECK(mixing.size() == 52);
}

TEST_CASE("stationary kernel dump for the game") {
  const auto dir = scratch("kernel");
  const auto cfg = write_config(dir, canonical());
  REQUIRE(run({"stationary", "--config", cfg.string(), "--out", dir.string(), "--dump-kernel"}).code == 0);
  const auto rows = lines(io::read_text(dir / "kernel.csv"));
  CHECK(rows.size() == 17);
  CHECK(rows[0].rfind("from,(0;0;0),(0;0;1)", 0) == 0);
}

TEST_CASE("ode with zero drift is constant") {
  const auto dir = scratch("ode");
  auto doc = canonical();
  doc["reinforcers"][0]["alpha"] = 0.0;
  doc["reinforcers"][0]["x0"] = 0.25;
  const auto r = run({"ode", "--config", write_config(dir, doc).string(), "--out", dir.string(),
                      "--steps", "20", "--method", "euler"});
  REQUIRE(r.code == cli::kOk);
  const auto rows = lines(io::read_text(dir / "ode.csv"));
  REQUIRE(rows.size() == 22);
  CHECK(rows[0] == "t,y_1,y_2,y_3,y_4,y_5,y_6,y_7,y_8");
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i].substr(rows[i].find(',')) == ",0.25,0.25,0.25,0.25,0.25,0.25,0.25,0.25");
  CHECK(json::parse(io::read_text(dir / "ode.json"))["method"] == "euler");
}

TEST_CASE("simulate and couple") {
  const auto dir = scratch("simulate");
  const auto cfg = write_config(dir, canonical());
  auto r = run({"simulate", "--config", cfg.string(), "--out", dir.string(), "--N", "200",
                "--seed", "5", "--stride", "50"});
  REQUIRE(r.code == cli::kOk);
  const auto rows = lines(io::read_text(dir / "trajectory.csv"));
  CHECK(rows.size() == 6);
  CHECK(rows[0] == "n,t,g,s_current,action,s_next,x_1,x_2,x_3,x_4,x_5,x_6,x_7,x_8");
  const auto meta = json::parse(io::read_text(dir / "simulate.json"));
  CHECK(meta["uniforms_consumed"] == 201);
  CHECK(meta["rng"] == "splitmix64-counter-v1");

  auto doc = canonical();
  doc["reinforcers"][0]["alpha"] = 0.0;
  const auto cdir = scratch("couple");
  r = run({"couple", "--config", write_config(cdir, doc).string(), "--out", cdir.string(), "--N",
           "100", "--T", "2"});
  REQUIRE(r.code == cli::kOk);
  const auto crow = lines(io::read_text(cdir / "coupled.csv"));
  REQUIRE(crow.size() == 202);
  for (std::size_t i = 1; i < crow.size(); ++i) CHECK(crow[i].back() == '0');
}

TEST_CASE("compare with zero learning rate") {
  const auto dir = scratch("compare0");
  const auto r = run({"compare", "--config",
                      (fs::path(MGFLUID_CONFIG_DIR) / "alpha0.json").string(), "--out",
                      dir.string()});
  REQUIRE(r.code == cli::kOk);
  for (const char* f : {"compare_N100.csv", "compare_N1000.csv"}) {
    const auto rows = lines(io::read_text(dir / f));
    CHECK(rows[0] == "rep,seed,sup_error");
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].substr(rows[i].rfind(',')) == ",0");
  }
  const auto manifest = json::parse(io::read_text(dir / "manifest.json"));
  CHECK(manifest["command"] == "compare");
  CHECK(manifest["files"].size() == 4);
}

TEST_CASE("compare thresholds and reproducibility") {
  const auto dir = scratch("compare");
  auto doc = canonical();
  doc["run"]["N"] = json::array({50, 200, 800});
  doc["run"]["reps"] = 8;
  doc["acceptance"] = {{"max_final_error", 1e-9}};
  const auto cfg = write_config(dir, doc);
  const auto a = run({"compare", "--config", cfg.string(), "--out", (dir / "a").string()});
  CHECK(a.code == cli::kThresholdFailed);
  CHECK(fs::exists(dir / "a" / "manifest.json"));
  const auto b = run({"compare", "--config", cfg.string(), "--out", (dir / "b").string(), "--jobs", "2"});
  CHECK(b.code == cli::kThresholdFailed);
  for (const char* f : {"compare_N50.csv", "compare_N200.csv", "compare_N800.csv", "rate.csv",
                        "compare_summary.json"}) {
    CHECK(io::read_text(dir / "a" / f) == io::read_text(dir / "b" / f));
  }
  const auto ma = json::parse(io::read_text(dir / "a" / "manifest.json"));
  const auto mb = json::parse(io::read_text(dir / "b" / "manifest.json"));
  CHECK(ma["files"] == mb["files"]);
  CHECK(ma["config_hash"] == mb["config_hash"]);

  const auto c = run({"compare", "--config", cfg.string(), "--out", (dir / "c").string(), "--seed", "2"});
  CHECK(io::read_text(dir / "a" / "rate.csv") != io::read_text(dir / "c" / "rate.csv"));
  CHECK(json::parse(io::read_text(dir / "c" / "manifest.json"))["config_hash"] != ma["config_hash"]);
}

TEST_CASE("failed run leaves no manifest") {
  const auto dir = scratch("failed");
  io::write_text(dir / "manifest.json", "{}");
  auto doc = canonical();
  doc["run"]["N"] = json::array({100});
  doc["run"]["stride"] = 1;
  doc["run"]["ode_steps"] = 10;  // coarser than the snapshot grid
  doc["run"]["reps"] = 2;
  const auto r = run({"compare", "--config", write_config(dir, doc).string(), "--out", dir.string()});
  CHECK(r.code == cli::kError);
  CHECK(fs::exists(dir / "compare_N100.csv") == false);
  CHECK_FALSE(fs::exists(dir / "manifest.json"));
}

TEST_CASE("rate subcommand") {
  const auto dir = scratch("rate");
  io::write_text(dir / "pts.csv", "N,error\n10,0.1\n100,0.01\n1000,0.001\n");
  const auto r = run({"rate", "--input", (dir / "pts.csv").string(), "--out", dir.string()});
  REQUIRE(r.code == cli::kOk);
  const auto fit = json::parse(io::read_text(dir / "rate_fit.json"));
  CHECK(fit["slope"].get<double>() == doctest::Approx(-1.0).epsilon(1e-12));
  io::write_text(dir / "two.csv", "N,mean_error\n10,0.1\n100,0.01\n");
  CHECK(run({"rate", "--input", (dir / "two.csv").string(), "--out", dir.string()}).code == cli::kError);
}

TEST_CASE("usage errors and output directory precedence") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  CHECK(run({"compare", "--bogus"}).code == cli::kUsage);
  CHECK(run({"compare"}).code == cli::kError);
  CHECK(run({"--help"}).code == cli::kOk);

  const auto dir = scratch("precedence");
  auto doc = json::parse(io::read_text(fs::path(MGFLUID_CONFIG_DIR) / "stationary_2x2.json"));
  const auto plain = write_config(dir, doc, "plain.json");
  doc["output_dir"] = (dir / "from_config").string();
  const auto with_dir = write_config(dir, doc, "with_dir.json");

  setenv(cli::kOutDirEnv, (dir / "from_env").string().c_str(), 1);
  CHECK(run({"stationary", "--config", plain.string()}).code == 0);
  CHECK(fs::exists(dir / "from_env" / "manifest.json"));
  CHECK(run({"stationary", "--config", with_dir.string()}).code == 0);
  CHECK(fs::exists(dir / "from_config" / "manifest.json"));
  CHECK(run({"stationary", "--config", with_dir.string(), "--out", (dir / "from_flag").string()}).code == 0);
  CHECK(fs::exists(dir / "from_flag" / "manifest.json"));
  unsetenv(cli::kOutDirEnv);
}

TEST_CASE("csv and checksum helpers") {
  io::CsvWriter csv({"a", "b"});
  csv.row({"1", io::format_double(0.1)});
  CHECK(csv.str() == "a,b\n1,0.1\n");
  CHECK_THROWS(csv.row({"only one"}));
  CHECK(io::format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(std::stod(io::format_double(2.0 / 3.0)) == 2.0 / 3.0);
  CHECK(io::hex64(io::fnv1a64("")) == "cbf29ce484222325");
  CHECK(io::hex64(io::fnv1a64("a")) == "af63dc4c8601ec8c");
}
