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

#pragma once

#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cqoverlap/channel.hpp"
#include "cqoverlap/characterization.hpp"
#include "cqoverlap/conjecture.hpp"
#include "cqoverlap/core.hpp"
#include "cqoverlap/io.hpp"
#include "cqoverlap/oracle.hpp"
#include "cqoverlap/protocol.hpp"
#include "cqoverlap/version.hpp"

// Batch driver. Exit codes: 0 success, 2 usage/parameter error, 3 input
// validation failure, 4 surviving conjecture counterexample candidate.
// Reports are JSON on stdout (and --json-out); indices in reports and on
// the command line are 1-based, matching the sigma_1..sigma_n convention.

namespace cqoverlap {
namespace cli {

inline constexpr int kExitUsage = 2;
inline constexpr int kExitInvalidInput = 3;
inline constexpr int kExitCounterexample = 4;

namespace detail {

struct Global {
  std::uint64_t seed = 0;
  double tol = kStateTol;
  std::string json_out;
};

inline int fail(int code, const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return code;
}

inline int emit_report(const std::string& command, Json inputs, Json results,
                       const Global& global, std::chrono::steady_clock::time_point start) {
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const Json report{{"command", command},
                    {"inputs", std::move(inputs)},
                    {"results", std::move(results)},
                    {"wall_time", wall},
                    {"tool_version", kVersion}};
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!global.json_out.empty()) write_text_file(global.json_out, text);
  return 0;
}

inline Json witness_json(const PairOptimum& opt) {
  return Json{{"pair", Json::array({opt.i + 1, opt.j + 1})},
              {"witness_u", to_json(opt.witness_u)},
              {"witness_v", to_json(opt.witness_v)}};
}

}  // namespace detail

inline int run(std::vector<std::string> args) {
  using detail::fail;
  const auto start = std::chrono::steady_clock::now();

  CLI::App app{"classical-quantum channel overlap toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  detail::Global global;
  app.add_option("--seed", global.seed, "RNG seed (default 0)");
  app.add_option("--tol", global.tol, "state validation tolerance (default 1e-10)")
      ->check(CLI::PositiveNumber);
  app.add_option("--json-out", global.json_out, "also write the report JSON here");

  // gen
  int gen_n = 0, gen_d = 0;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "generate a seeded random channel instance");
  gen->add_option("--n", gen_n, "input dimension (>= 2)")->required();
  gen->add_option("--d", gen_d, "output dimension (>= 1)")->required();
  gen->add_option("--out", gen_out, "instance file to write")->required();

  // validate
  std::string validate_in;
  auto* validate = app.add_subcommand("validate", "check an instance file's invariants");
  validate->add_option("--in", validate_in, "instance file")->required();

  // solve
  std::string solve_in, solve_direction, solve_method;
  OptimizerConfig solve_cfg;
  int solve_resolution = 100;
  auto* solve = app.add_subcommand("solve", "compute the min/max output overlap");
  solve->add_option("--in", solve_in, "instance file")->required();
  solve->add_option("--direction", solve_direction, "min or max")
      ->required()
      ->check(CLI::IsMember({"min", "max"}));
  solve->add_option("--method", solve_method, "closed, oracle, or grid")
      ->required()
      ->check(CLI::IsMember({"closed", "oracle", "grid"}));
  solve->add_option("--restarts", solve_cfg.restarts, "oracle restarts (default 200)")
      ->check(CLI::PositiveNumber);
  solve->add_option("--max-iters", solve_cfg.max_iters, "iterations per restart (default 300)")
      ->check(CLI::PositiveNumber);
  solve->add_option("--step-init", solve_cfg.step_init, "initial line-search step (default 1.0)")
      ->check(CLI::PositiveNumber);
  solve->add_option("--grad-tol", solve_cfg.grad_tol, "gradient norm stop (default 1e-8)")
      ->check(CLI::PositiveNumber);
  solve->add_option("--resolution", solve_resolution, "grid resolution (default 100)")
      ->check(CLI::PositiveNumber);

  // reduce
  std::string reduce_kind, reduce_table, reduce_out;
  double reduce_c = -1.0, reduce_s = -1.0;
  auto* reduce = app.add_subcommand(
      "reduce", "build the hardness-reduction channel for an acceptance table");
  reduce->add_option("--kind", reduce_kind, "so or lo")
      ->required()
      ->check(CLI::IsMember({"so", "lo"}));
  reduce->add_option("--table", reduce_table, "acceptance table JSON")->required();
  reduce->add_option("--out", reduce_out, "instance file to write")->required();
  reduce->add_option("--c", reduce_c, "completeness threshold (default: so 1, lo 5/8)");
  reduce->add_option("--s", reduce_s, "soundness threshold (default: so 1/2, lo 9/16)");

  // conjecture
  ScanParams scan_params{};
  std::string conjecture_out;
  auto* conjecture = app.add_subcommand(
      "conjecture", "scan random instances for k-state bound counterexamples");
  conjecture->add_option("--n", scan_params.n, "input dimension")->required();
  conjecture->add_option("--d", scan_params.d, "output dimension")->required();
  conjecture->add_option("--k", scan_params.k, "tuple size (2 <= k <= n)")->required();
  conjecture->add_option("--instances", scan_params.instances, "random channels to scan")
      ->required();
  conjecture->add_option("--tuples", scan_params.tuples_per_instance,
                         "orthonormal tuples per channel")
      ->required();
  conjecture->add_option("--out", conjecture_out, "CSV report path")->required();

  // swaptest
  std::string swap_in;
  int swap_i = 0, swap_j = 0;
  std::uint64_t swap_shots = 100000;
  auto* swaptest = app.add_subcommand(
      "swaptest", "exact and sampled verifier acceptance for a witness pair");
  swaptest->add_option("--in", swap_in, "instance file")->required();
  swaptest->add_option("--i", swap_i, "first witness index (1-based)")->required();
  swaptest->add_option("--j", swap_j, "second witness index (1-based)")->required();
  swaptest->add_option("--shots", swap_shots, "Bernoulli shots (default 1e5)");

  try {
    std::vector<const char*> argv;
    argv.push_back("cqoverlap");
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      if (gen_n < 2) {
        return fail(kExitUsage, "gen: --n must be >= 2 (an orthogonal input pair must exist)");
      }
      if (gen_d < 1) return fail(kExitUsage, "gen: --d must be >= 1");
      const CQChannel ch = CQChannel::random(gen_n, gen_d, global.seed);
      const Provenance prov{"ginibre", global.seed, Json{{"n", gen_n}, {"d", gen_d}}};
      try {
        write_text_file(gen_out, instance_to_json(ch, prov).dump(2) + "\n");
      } catch (const ConfigError& e) {
        return fail(kExitUsage, e.what());
      }
      return detail::emit_report(
          "gen", Json{{"n", gen_n}, {"d", gen_d}, {"seed", global.seed}, {"out", gen_out}},
          Json{{"out", gen_out}, {"validated", true}, {"state_tol", global.tol}},
          global, start);
    }

    if (validate->parsed()) {
      CQChannel ch = [&] {
        try {
          return load_instance(validate_in, global.tol);
        } catch (const Error& e) {
          throw ValidationError(e.what());
        }
      }();
      return detail::emit_report(
          "validate", Json{{"in", validate_in}},
          Json{{"valid", true},
               {"n", ch.input_dim()},
               {"d", ch.output_dim()},
               {"state_tol", global.tol}},
          global, start);
    }

    if (solve->parsed()) {
      CQChannel ch = [&] {
        try {
          return load_instance(solve_in, global.tol);
        } catch (const Error& e) {
          throw ValidationError(e.what());
        }
      }();
      const Direction dir =
          solve_direction == "min" ? Direction::Minimize : Direction::Maximize;
      const PairOptimum closed =
          dir == Direction::Minimize ? min_overlap_pair(ch) : max_overlap_pair(ch);
      Json inputs{{"in", solve_in}, {"direction", solve_direction},
                  {"method", solve_method}, {"seed", global.seed}};
      Json results;
      if (solve_method == "closed") {
        results = detail::witness_json(closed);
        results["value"] = closed.value;
        results["value_tol"] = 1e-12;  // witness attainment tolerance
      } else if (solve_method == "oracle") {
        solve_cfg.seed = global.seed;
        const OracleResult r = continuous_extremum(ch, dir, solve_cfg);
        inputs["restarts"] = solve_cfg.restarts;
        inputs["max_iters"] = solve_cfg.max_iters;
        results = Json{{"value", r.value},
                       {"value_tol", 1e-6},  // expected gap to the closed form
                       {"converged", r.converged},
                       {"iterations_used", r.iterations_used},
                       {"gap_to_closed", r.value - closed.value},
                       {"witness_u", to_json(r.u)},
                       {"witness_v", to_json(r.v)}};
      } else {
        const OracleResult r = grid_extremum(ch, dir, solve_resolution);
        inputs["resolution"] = solve_resolution;
        results = Json{{"value", r.value},
                       {"value_tol", 1.0 / solve_resolution},
                       {"points_evaluated", r.iterations_used},
                       {"gap_to_closed", r.value - closed.value},
                       {"witness_u", to_json(r.u)},
                       {"witness_v", to_json(r.v)}};
      }
      return detail::emit_report("solve", std::move(inputs), std::move(results),
                                 global, start);
    }

    if (reduce->parsed()) {
      const ProblemKind kind =
          reduce_kind == "so" ? ProblemKind::SmallOverlap : ProblemKind::LargeOverlap;
      // Defaults anchored to the hardness constructions: SO separates 0 from
      // above 1/2; LO separates 5/8 from below 9/16.
      double c = reduce_c, s = reduce_s;
      if (c < 0.0) c = kind == ProblemKind::SmallOverlap ? 1.0 : 5.0 / 8.0;
      if (s < 0.0) s = kind == ProblemKind::SmallOverlap ? 0.5 : 9.0 / 16.0;
      if (!(c > s)) return fail(kExitUsage, "reduce: require c > s");
      AcceptanceTable table = [&] {
        try {
          return table_from_json(load_json_file(reduce_table));
        } catch (const ValidationError& e) {
          throw TableError(e.what());
        }
      }();
      const CQChannel ch = kind == ProblemKind::SmallOverlap
                               ? build_small_overlap_channel(table)
                               : build_large_overlap_channel(table);
      const GapReport gap = classify_instance(ch, kind, c, s);
      const Provenance prov{
          reduce_kind + "_reduction", global.seed,
          Json{{"bits", table.bits()}, {"table", reduce_table}}};
      try {
        write_text_file(reduce_out, instance_to_json(ch, prov).dump(2) + "\n");
      } catch (const ConfigError& e) {
        return fail(kExitUsage, e.what());
      }
      return detail::emit_report(
          "reduce",
          Json{{"kind", reduce_kind}, {"table", reduce_table}, {"out", reduce_out},
               {"c", c}, {"s", s}},
          Json{{"out", reduce_out},
               {"n", ch.input_dim()},
               {"d", ch.output_dim()},
               {"missing_entries", table.num_missing()},
               {"gap_report", gap_report_to_json(gap)},
               {"formula_tol", 1e-12}},
          global, start);
    }

    if (conjecture->parsed()) {
      scan_params.seed = global.seed;
      std::vector<ConjectureRecord> records;
      try {
        records = conjecture_scan(scan_params);
      } catch (const Error& e) {
        return fail(kExitUsage, std::string("conjecture: ") + e.what());
      }
      double min_margin = std::numeric_limits<double>::infinity();
      for (const auto& r : records) min_margin = std::min(min_margin, r.margin);

      Json survivors = Json::array();
      for (const auto& r : records) {
        if (!is_counterexample_candidate(r)) continue;
        const ConjectureRecord fresh = reverify(r);
        if (!is_counterexample_candidate(fresh)) continue;  // false alarm
        const CQChannel ch = CQChannel::random(fresh.n, fresh.d, fresh.instance_seed);
        const std::string dump_path =
            conjecture_out + ".candidate-" + std::to_string(fresh.instance_seed) + ".json";
        Json dump{{"record", record_to_json(fresh)},
                  {"instance", instance_to_json(
                                   ch, Provenance{"ginibre", fresh.instance_seed,
                                                  Json{{"n", fresh.n}, {"d", fresh.d}}})}};
        write_text_file(dump_path, dump.dump(2) + "\n");
        survivors.push_back(record_to_json(fresh));
      }
      try {
        write_text_file(conjecture_out, scan_records_to_csv(records));
      } catch (const ConfigError& e) {
        return fail(kExitUsage, e.what());
      }
      const int code = detail::emit_report(
          "conjecture",
          Json{{"n", scan_params.n}, {"d", scan_params.d}, {"k", scan_params.k},
               {"instances", scan_params.instances},
               {"tuples", scan_params.tuples_per_instance},
               {"seed", global.seed}, {"out", conjecture_out}},
          Json{{"csv", conjecture_out},
               {"records", records.size()},
               {"min_margin", min_margin},
               {"candidate_threshold", kCounterexampleThreshold},
               {"survivors", survivors}},
          global, start);
      if (!survivors.empty()) return kExitCounterexample;
      return code;
    }

    if (swaptest->parsed()) {
      CQChannel ch = [&] {
        try {
          return load_instance(swap_in, global.tol);
        } catch (const Error& e) {
          throw ValidationError(e.what());
        }
      }();
      const int n = ch.input_dim();
      if (swap_i < 1 || swap_i > n || swap_j < 1 || swap_j > n) {
        return fail(kExitUsage, "swaptest: indices must lie in 1.." + std::to_string(n));
      }
      if (swap_i == swap_j) {
        return fail(kExitUsage, "swaptest: witness indices must be distinct");
      }
      if (swap_shots == 0) return fail(kExitUsage, "swaptest: --shots must be >= 1");
      const int i = swap_i - 1, j = swap_j - 1;

      const double so_exact = small_overlap_verifier_accept(ch, i, j);
      const SwapTestResult so_raw =
          simulate_swap(ch.sigma(i), ch.sigma(j), swap_shots, derive_seed(global.seed, 0));

      const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
      CVector plus = CVector::Zero(n), minus = CVector::Zero(n);
      plus(i) = inv_sqrt2;
      plus(j) = inv_sqrt2;
      minus(i) = inv_sqrt2;
      minus(j) = -inv_sqrt2;
      const DensityMatrix out_plus = apply(ch, PureState(plus).projector());
      const DensityMatrix out_minus = apply(ch, PureState(minus).projector());
      const double lo_exact = large_overlap_verifier_accept(ch, i, j);
      const SwapTestResult lo_raw =
          simulate_swap(out_plus, out_minus, swap_shots, derive_seed(global.seed, 1));

      auto five_sigma = [&](double p) {
        return 5.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(swap_shots));
      };
      return detail::emit_report(
          "swaptest",
          Json{{"in", swap_in}, {"i", swap_i}, {"j", swap_j},
               {"shots", swap_shots}, {"seed", global.seed}},
          Json{{"so",
                Json{{"exact", so_exact},
                     {"empirical", 1.0 - so_raw.empirical_accept},
                     {"empirical_tol_5sigma", five_sigma(so_exact)}}},
               {"lo",
                Json{{"exact", lo_exact},
                     {"empirical", lo_raw.empirical_accept},
                     {"empirical_tol_5sigma", five_sigma(lo_exact)}}},
               {"shots", swap_shots}},
          global, start);
    }
  } catch (const ValidationError& e) {
    return fail(kExitInvalidInput, e.what());
  } catch (const TableError& e) {
    return fail(kExitInvalidInput, e.what());
  } catch (const CapacityError& e) {
    return fail(kExitInvalidInput, e.what());
  } catch (const DimensionError& e) {
    return fail(kExitInvalidInput, e.what());
  } catch (const ConfigError& e) {
    return fail(kExitUsage, e.what());
  } catch (const Error& e) {
    return fail(kExitInvalidInput, e.what());
  } catch (const std::exception& e) {
    return fail(1, std::string("internal error: ") + e.what());
  }
  return 0;
}

}  // namespace cli
}  // namespace cqoverlap
