// Copyright 2026 The cqoverlap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "cqoverlap/cli.hpp"
#include "cqoverlap/io.hpp"

using namespace cqoverlap;
namespace fs = std::filesystem;

namespace {

struct CliOutcome {
  int code;
  std::string out;
  Json report;  // null when stdout was not a report
};

CliOutcome run_cli(std::vector<std::string> args) {
  std::ostringstream captured;
  std::streambuf* saved = std::cout.rdbuf(captured.rdbuf());
  int code = -1;
  try {
    code = cli::run(std::move(args));
  } catch (...) {
    std::cout.rdbuf(saved);
    throw;
  }
  std::cout.rdbuf(saved);
  CliOutcome outcome{code, captured.str(), Json()};
  if (!outcome.out.empty() && outcome.out.front() == '{') {
    outcome.report = Json::parse(outcome.out);
  }
  return outcome;
}

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / "cqoverlap_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_basis_instance(int n) {
  const auto path = temp_dir() / ("basis" + std::to_string(n) + ".json");
  write_text_file(path.string(),
                  instance_to_json(CQChannel::basis(n), std::nullopt).dump(2));
  return path.string();
}

}  // namespace

TEST_CASE("gen writes deterministic, valid instances") {
  const auto out1 = (temp_dir() / "gen1.json").string();
  const auto out2 = (temp_dir() / "gen2.json").string();

  CHECK(run_cli({"--seed", "1", "gen", "--n", "2", "--d", "2", "--out", out1}).code == 0);
  CHECK(run_cli({"--seed", "1", "gen", "--n", "2", "--d", "2", "--out", out2}).code == 0);
  CHECK(slurp(out1) == slurp(out2));

  const auto validated = run_cli({"validate", "--in", out1});
  CHECK(validated.code == 0);
  CHECK(validated.report["results"]["valid"] == true);
  CHECK(validated.report["results"]["n"] == 2);
}

TEST_CASE("gen rejects undersized channels with a usage error") {
  const auto out = (temp_dir() / "bad.json").string();
  const auto r = run_cli({"gen", "--n", "1", "--d", "2", "--out", out});
  CHECK(r.code == cli::kExitUsage);
}

TEST_CASE("validate flags corrupted instances") {
  const auto path = temp_dir() / "corrupt.json";
  Json j = instance_to_json(CQChannel::basis(2), std::nullopt);
  j["channel"]["sigmas"][0][0][0][0] = 0.8;  // trace no longer 1
  write_text_file(path.string(), j.dump());
  CHECK(run_cli({"validate", "--in", path.string()}).code == cli::kExitInvalidInput);

  const auto missing = (temp_dir() / "missing.json").string();
  CHECK(run_cli({"validate", "--in", missing}).code == cli::kExitInvalidInput);

  const auto future = temp_dir() / "future_schema.json";
  Json f = instance_to_json(CQChannel::basis(2), std::nullopt);
  f["schema_version"] = 2;
  write_text_file(future.string(), f.dump());
  CHECK(run_cli({"validate", "--in", future.string()}).code == cli::kExitInvalidInput);
}

TEST_CASE("solve closed on the basis channel") {
  const auto path = write_basis_instance(2);
  const auto r = run_cli({"solve", "--in", path, "--direction", "min",
                          "--method", "closed"});
  REQUIRE(r.code == 0);
  CHECK(r.report["results"]["value"] == 0.0);
  CHECK(r.report["results"]["pair"] == Json::array({1, 2}));
}

TEST_CASE("solve oracle reports a small gap to the closed form") {
  const auto path = (temp_dir() / "seeded.json").string();
  REQUIRE(run_cli({"--seed", "13", "gen", "--n", "4", "--d", "2", "--out", path}).code == 0);
  const auto r = run_cli({"--seed", "13", "solve", "--in", path, "--direction", "min",
                          "--method", "oracle", "--restarts", "80"});
  REQUIRE(r.code == 0);
  CHECK(std::abs(r.report["results"]["gap_to_closed"].get<double>()) <= 1e-6);
}

TEST_CASE("solve grid refuses four-input instances with exit 3") {
  const auto path = write_basis_instance(4);
  const auto r = run_cli({"solve", "--in", path, "--direction", "min",
                          "--method", "grid"});
  CHECK(r.code == cli::kExitInvalidInput);
}

TEST_CASE("solve validates flag values through the parser") {
  const auto path = write_basis_instance(2);
  CHECK(run_cli({"solve", "--in", path, "--direction", "sideways",
                 "--method", "closed"}).code == cli::kExitUsage);
  CHECK(run_cli({"solve", "--in", path, "--direction", "min",
                 "--method", "magic"}).code == cli::kExitUsage);
}

TEST_CASE("reduce builds and classifies the exact small-overlap case") {
  const auto table_path = (temp_dir() / "so_table.json").string();
  write_text_file(table_path, R"({"bits": 1, "probs": {"0": 1.0, "1": 0.0}})");
  const auto out = (temp_dir() / "so_channel.json").string();
  const auto r = run_cli({"reduce", "--kind", "so", "--table", table_path,
                          "--out", out});
  REQUIRE(r.code == 0);
  CHECK(r.report["results"]["gap_report"]["verdict"] == "yes-like");
  CHECK(r.report["results"]["gap_report"]["extremum"] == 0.0);

  // The written instance is loadable and reproduces the classification.
  const auto ch = load_instance(out);
  CHECK(min_overlap_pair(ch).value == 0.0);
}

TEST_CASE("reduce classifies the all-reject large-overlap table") {
  const auto table_path = (temp_dir() / "lo_zero.json").string();
  write_text_file(table_path, R"({"bits": 1, "probs": {"0": 0.0, "1": 0.0}})");
  const auto out = (temp_dir() / "lo_zero_channel.json").string();
  const auto r = run_cli({"reduce", "--kind", "lo", "--table", table_path,
                          "--out", out});
  REQUIRE(r.code == 0);
  CHECK(r.report["results"]["gap_report"]["extremum"] == 0.5);
  CHECK(r.report["results"]["gap_report"]["verdict"] == "no-like");
}

TEST_CASE("reduce reaches five eighths with a single certain witness") {
  const auto table_path = (temp_dir() / "lo_one.json").string();
  write_text_file(table_path, R"({"bits": 1, "probs": {"0": 1.0}})");
  const auto out = (temp_dir() / "lo_one_channel.json").string();
  const auto r = run_cli({"reduce", "--kind", "lo", "--table", table_path,
                          "--out", out});
  REQUIRE(r.code == 0);
  CHECK(r.report["results"]["gap_report"]["extremum"] == 5.0 / 8.0);
  CHECK(r.report["results"]["missing_entries"] == 1);
}

TEST_CASE("reduce rejects malformed tables with exit 3") {
  const auto table_path = (temp_dir() / "bad_table.json").string();
  write_text_file(table_path, R"({"bits": 2, "probs": {"0": 1.0}})");
  const auto out = (temp_dir() / "never.json").string();
  CHECK(run_cli({"reduce", "--kind", "so", "--table", table_path, "--out", out}).code ==
        cli::kExitInvalidInput);
}

TEST_CASE("conjecture scan exits cleanly and writes the CSV") {
  const auto csv = (temp_dir() / "scan.csv").string();
  const auto r = run_cli({"--seed", "101", "conjecture", "--n", "4", "--d", "2",
                          "--k", "2", "--instances", "10", "--tuples", "10",
                          "--out", csv});
  REQUIRE(r.code == 0);

  const std::string text = slurp(csv);
  int lines = 0;
  for (char c : text) lines += c == '\n';
  CHECK(lines == 11);  // header plus one row per instance
  CHECK(text.rfind("instance_seed,n,d,k,lhs,rhs,margin\n", 0) == 0);
}

TEST_CASE("conjecture rejects bad parameters and paths with exit 2") {
  const auto csv = (temp_dir() / "never.csv").string();
  CHECK(run_cli({"conjecture", "--n", "4", "--d", "2", "--k", "9",
                 "--instances", "2", "--tuples", "2", "--out", csv}).code ==
        cli::kExitUsage);
  CHECK(run_cli({"conjecture", "--n", "4", "--d", "2", "--k", "2",
                 "--instances", "2", "--tuples", "2", "--out",
                 "/nonexistent_dir_xyz/scan.csv"}).code == cli::kExitUsage);
}

TEST_CASE("swaptest reports exact verifier acceptance on the basis channel") {
  const auto path = write_basis_instance(2);
  const auto r = run_cli({"--seed", "4", "swaptest", "--in", path, "--i", "1",
                          "--j", "2", "--shots", "100000"});
  REQUIRE(r.code == 0);
  CHECK(r.report["results"]["so"]["exact"] == 0.5);
  CHECK(r.report["results"]["lo"]["exact"] == 0.75);
  const double so_emp = r.report["results"]["so"]["empirical"].get<double>();
  const double lo_emp = r.report["results"]["lo"]["empirical"].get<double>();
  CHECK(std::abs(so_emp - 0.5) <= 0.008);
  CHECK(std::abs(lo_emp - 0.75) <= 0.007);
}

TEST_CASE("swaptest rejects equal witness indices") {
  const auto path = write_basis_instance(2);
  CHECK(run_cli({"swaptest", "--in", path, "--i", "1", "--j", "1"}).code ==
        cli::kExitUsage);
  CHECK(run_cli({"swaptest", "--in", path, "--i", "0", "--j", "1"}).code ==
        cli::kExitUsage);
}

TEST_CASE("instance round-trip preserves every byte of the channel block") {
  const auto path = (temp_dir() / "roundtrip.json").string();
  REQUIRE(run_cli({"--seed", "23", "gen", "--n", "3", "--d", "3", "--out", path}).code == 0);

  const Json original = load_json_file(path);
  const CQChannel ch = instance_from_json(original);
  CHECK(channel_to_json(ch).dump() == original["channel"].dump());

  // Solving the reloaded channel matches solving the original file.
  const auto r1 = run_cli({"solve", "--in", path, "--direction", "min",
                           "--method", "closed"});
  const auto path2 = (temp_dir() / "roundtrip2.json").string();
  write_text_file(path2, instance_to_json(ch, std::nullopt).dump(2));
  const auto r2 = run_cli({"solve", "--in", path2, "--direction", "min",
                           "--method", "closed"});
  CHECK(r1.report["results"]["value"] == r2.report["results"]["value"]);
}

TEST_CASE("reports are deterministic apart from wall time") {
  const auto path = write_basis_instance(3);
  auto a = run_cli({"solve", "--in", path, "--direction", "max", "--method", "closed"});
  auto b = run_cli({"solve", "--in", path, "--direction", "max", "--method", "closed"});
  a.report.erase("wall_time");
  b.report.erase("wall_time");
  CHECK(a.report == b.report);
}

TEST_CASE("json-out mirrors the report") {
  const auto path = write_basis_instance(2);
  const auto mirror = (temp_dir() / "report.json").string();
  const auto r = run_cli({"--json-out", mirror, "solve", "--in", path,
                          "--direction", "min", "--method", "closed"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(slurp(mirror)) == r.report);
}

TEST_CASE("unknown subcommands and missing flags are usage errors") {
  CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run_cli({"gen", "--n", "2"}).code == cli::kExitUsage);
  CHECK(run_cli({}).code == cli::kExitUsage);
}
