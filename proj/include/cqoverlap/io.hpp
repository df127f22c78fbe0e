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

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqoverlap/channel.hpp"
#include "cqoverlap/conjecture.hpp"
#include "cqoverlap/core.hpp"
#include "cqoverlap/protocol.hpp"
#include "cqoverlap/version.hpp"

namespace cqoverlap {

using Json = nlohmann::json;

// Complex scalars serialize as [re, im]; matrices as nested row-major arrays.

inline Json to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json to_json(const PureState& s) {
  Json amps = Json::array();
  for (Eigen::Index i = 0; i < s.amplitudes().size(); ++i) {
    amps.push_back(to_json(s.amplitudes()(i)));
  }
  return amps;
}

inline Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ValidationError("expected a complex scalar as [re, im]");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("expected a matrix as nested arrays");
  const auto rows = j.size();
  const auto cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ValidationError("matrix rows must be non-empty arrays");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ValidationError("matrix rows have inconsistent lengths");
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Channel and instance files
// ---------------------------------------------------------------------------

inline Json channel_to_json(const CQChannel& ch) {
  Json sigmas = Json::array();
  for (const auto& s : ch.sigmas()) sigmas.push_back(to_json(s.matrix()));
  return Json{{"n", ch.input_dim()}, {"d", ch.output_dim()}, {"sigmas", std::move(sigmas)}};
}

inline CQChannel channel_from_json(const Json& j, double tol = kStateTol) {
  if (!j.is_object() || !j.contains("n") || !j.contains("d") || !j.contains("sigmas")) {
    throw ValidationError("channel JSON must have fields n, d, sigmas");
  }
  const int n = j.at("n").get<int>();
  const int d = j.at("d").get<int>();
  const Json& sigmas = j.at("sigmas");
  if (!sigmas.is_array() || static_cast<int>(sigmas.size()) != n) {
    throw ValidationError("channel JSON: sigmas must list exactly n matrices");
  }
  std::vector<DensityMatrix> states;
  states.reserve(n);
  for (const auto& sj : sigmas) {
    const Matrix m = matrix_from_json(sj);
    detail::require_same_dim(m.rows(), d, "channel JSON sigma dimension");
    states.push_back(validate_density(m, tol));
  }
  return CQChannel(std::move(states));
}

struct Provenance {
  std::string generator;
  std::uint64_t seed = 0;
  Json params;
};

inline Json instance_to_json(const CQChannel& ch,
                             const std::optional<Provenance>& provenance) {
  Json j{{"schema_version", kSchemaVersion}, {"channel", channel_to_json(ch)}};
  if (provenance.has_value()) {
    j["provenance"] = Json{{"generator", provenance->generator},
                           {"seed", provenance->seed},
                           {"params", provenance->params}};
  }
  return j;
}

inline CQChannel instance_from_json(const Json& j, double tol = kStateTol) {
  if (!j.is_object() || !j.contains("schema_version") || !j.contains("channel")) {
    throw ValidationError("instance JSON must have schema_version and channel");
  }
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw ValidationError("unsupported schema_version, expected " +
                          std::to_string(kSchemaVersion));
  }
  return channel_from_json(j.at("channel"), tol);
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw ValidationError("JSON parse error in " + path + ": " + e.what());
  }
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << text;
  if (!out) throw ConfigError("failed writing output file: " + path);
}

inline CQChannel load_instance(const std::string& path, double tol = kStateTol) {
  return instance_from_json(load_json_file(path), tol);
}

// ---------------------------------------------------------------------------
// Acceptance tables, gap reports
// ---------------------------------------------------------------------------

/// Table JSON: {"bits": m, "probs": {"0101": 0.97, ...}}.
inline AcceptanceTable table_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("bits") || !j.contains("probs")) {
    throw TableError("table JSON must have fields bits and probs");
  }
  if (!j.at("bits").is_number_integer()) throw TableError("table bits must be an integer");
  std::map<std::string, double> probs;
  const Json& pj = j.at("probs");
  if (!pj.is_object()) throw TableError("table probs must be an object");
  for (auto it = pj.begin(); it != pj.end(); ++it) {
    if (!it.value().is_number()) {
      throw TableError("table probability for '" + it.key() + "' is not a number");
    }
    probs[it.key()] = it.value().get<double>();
  }
  return AcceptanceTable(j.at("bits").get<int>(), std::move(probs));
}

inline Json table_to_json(const AcceptanceTable& table) {
  Json probs = Json::object();
  for (const auto& [key, p] : table.declared()) probs[key] = p;
  return Json{{"bits", table.bits()}, {"probs", std::move(probs)}};
}

inline Json gap_report_to_json(const GapReport& r) {
  return Json{{"kind", to_string(r.kind)},
              {"extremum", r.extremum},
              {"yes_value", r.yes_value},
              {"no_threshold", r.no_threshold},
              {"verdict", to_string(r.verdict)}};
}

// ---------------------------------------------------------------------------
// Scan CSV
// ---------------------------------------------------------------------------

namespace detail {

/// Shortest-17-digit formatting; round-trips doubles exactly.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string scan_records_to_csv(const std::vector<ConjectureRecord>& records) {
  std::ostringstream out;
  out << "instance_seed,n,d,k,lhs,rhs,margin\n";
  for (const auto& r : records) {
    out << r.instance_seed << ',' << r.n << ',' << r.d << ',' << r.k << ','
        << detail::format_double(r.lhs) << ',' << detail::format_double(r.rhs)
        << ',' << detail::format_double(r.margin) << '\n';
  }
  return out.str();
}

inline Json record_to_json(const ConjectureRecord& r) {
  return Json{{"instance_seed", r.instance_seed},
              {"n", r.n},
              {"d", r.d},
              {"k", r.k},
              {"lhs", r.lhs},
              {"rhs", r.rhs},
              {"margin", r.margin},
              {"states_seed", r.states_seed}};
}

}  // namespace cqoverlap
