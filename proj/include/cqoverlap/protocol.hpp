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

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cqoverlap/channel.hpp"
#include "cqoverlap/characterization.hpp"
#include "cqoverlap/core.hpp"
#include "cqoverlap/random.hpp"

namespace cqoverlap {

// ---------------------------------------------------------------------------
// SWAP test
// ---------------------------------------------------------------------------

/// Acceptance probability of the SWAP test on rho x sigma:
/// 1/2 + 1/2 Tr(rho sigma). In [1/2, 1] for valid states.
inline double swap_accept_prob(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return 0.5 + 0.5 * hs_overlap(rho, sigma);
}

struct SwapTestResult {
  double exact_accept;
  double empirical_accept;
  std::uint64_t shots;
};

/// Bernoulli model of repeated SWAP-test ancilla measurements: `shots`
/// independent draws at the exact acceptance probability, deterministic
/// per seed.
inline SwapTestResult simulate_swap(const DensityMatrix& rho,
                                    const DensityMatrix& sigma,
                                    std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw ArityError("simulate_swap: shots must be >= 1");
  const double exact = swap_accept_prob(rho, sigma);
  Rng rng(seed);
  std::bernoulli_distribution accept(std::clamp(exact, 0.0, 1.0));
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < shots; ++s) {
    if (accept(rng)) ++hits;
  }
  return SwapTestResult{exact, static_cast<double>(hits) / shots, shots};
}

// ---------------------------------------------------------------------------
// Verifier acceptance for the two overlap problems
// ---------------------------------------------------------------------------

namespace detail {

inline void require_distinct_pair(const CQChannel& ch, int i, int j, const char* what) {
  const int n = ch.input_dim();
  if (i < 0 || i >= n || j < 0 || j >= n) {
    throw DimensionError(std::string(what) + ": index out of range");
  }
  if (i == j) {
    throw WitnessError(std::string(what) + ": witness indices must be distinct");
  }
}

}  // namespace detail

/// Small-overlap verifier: swap-test the outputs sigma_i, sigma_j and accept
/// exactly when the test fails; acceptance probability 1/2 - 1/2 Tr(sigma_i sigma_j).
inline double small_overlap_verifier_accept(const CQChannel& ch, int i, int j) {
  detail::require_distinct_pair(ch, i, j, "small_overlap_verifier_accept");
  return 0.5 - 0.5 * ch.gram()(i, j);
}

/// Large-overlap verifier: feed (|i> + |j>)/sqrt(2) and (|i> - |j>)/sqrt(2)
/// through the channel and accept when the swap test on the outputs accepts;
/// acceptance probability 1/2 + 1/8 Tr((sigma_i + sigma_j)^2).
inline double large_overlap_verifier_accept(const CQChannel& ch, int i, int j) {
  detail::require_distinct_pair(ch, i, j, "large_overlap_verifier_accept");
  const GramMatrix& m = ch.gram();
  return 0.5 + 0.125 * (m(i, i) + m(j, j) + 2.0 * m(i, j));
}

// ---------------------------------------------------------------------------
// Acceptance tables and reduction channels
// ---------------------------------------------------------------------------

/// Largest witness length accepted; a table on m bits expands to a channel
/// with 2^m inputs and a dense Gram matrix, so this is a desk-scale cap.
inline constexpr int kMaxTableBits = 10;

/// Map from length-m bitstrings y to acceptance probabilities p_y, standing
/// in for a verifier circuit's acceptance on classical witnesses. Undeclared
/// strings carry p = 0; the count of such strings is reported so sparse
/// tables are visible downstream.
class AcceptanceTable {
 public:
  AcceptanceTable(int bits, std::map<std::string, double> probs)
      : bits_(bits), declared_(std::move(probs)) {
    if (bits_ < 1) throw TableError("AcceptanceTable: bits must be >= 1");
    if (bits_ > kMaxTableBits) {
      throw CapacityError("AcceptanceTable: bits = " + std::to_string(bits_) +
                          " exceeds cap " + std::to_string(kMaxTableBits));
    }
    dense_.assign(std::size_t{1} << bits_, 0.0);
    for (const auto& [key, p] : declared_) {
      if (static_cast<int>(key.size()) != bits_) {
        throw TableError("AcceptanceTable: key '" + key + "' has length " +
                         std::to_string(key.size()) + ", expected " +
                         std::to_string(bits_));
      }
      if (!(p >= 0.0 && p <= 1.0)) {
        throw TableError("AcceptanceTable: probability for '" + key +
                         "' outside [0, 1]");
      }
      dense_[index_of(key)] = p;
    }
  }

  int bits() const { return bits_; }
  int num_inputs() const { return static_cast<int>(dense_.size()); }
  int num_missing() const { return num_inputs() - static_cast<int>(declared_.size()); }
  double prob(std::size_t index) const { return dense_.at(index); }
  const std::map<std::string, double>& declared() const { return declared_; }

  /// Bitstring for input index (first character is the first witness bit).
  std::string bitstring(std::size_t index) const {
    std::string s(bits_, '0');
    for (int b = 0; b < bits_; ++b) {
      if ((index >> (bits_ - 1 - b)) & 1u) s[b] = '1';
    }
    return s;
  }

  std::size_t index_of(const std::string& key) const {
    std::size_t idx = 0;
    for (char c : key) {
      if (c != '0' && c != '1') {
        throw TableError("AcceptanceTable: key '" + key + "' is not binary");
      }
      idx = (idx << 1) | static_cast<std::size_t>(c == '1');
    }
    return idx;
  }

 private:
  int bits_;
  std::map<std::string, double> declared_;
  std::vector<double> dense_;
};

/// Reduction channel for the small-overlap problem. Inputs are the 2^m
/// witnesses; the output for y is
///   p_y |y1, not y1><y1, not y1| + (1 - p_y) |00><00|
/// on two qubits (basis index 2*b1 + b2), so pairwise output overlaps follow
/// the case formula p_y p_z + (1-p_y)(1-p_z) when y1 = z1 and
/// (1-p_y)(1-p_z) otherwise.
inline CQChannel build_small_overlap_channel(const AcceptanceTable& table) {
  const int n = table.num_inputs();
  std::vector<DensityMatrix> sigmas;
  sigmas.reserve(n);
  for (int y = 0; y < n; ++y) {
    const double p = table.prob(y);
    const int first_bit = (y >> (table.bits() - 1)) & 1;
    const int accept_ket = first_bit ? 2 : 1;  // |10> or |01>
    Matrix m = Matrix::Zero(4, 4);
    m(accept_ket, accept_ket) = p;
    m(0, 0) = 1.0 - p;
    sigmas.push_back(validate_density(m));
  }
  return CQChannel(std::move(sigmas));
}

/// Reduction channel for the large-overlap problem: the output for y is
/// p_y |0><0| + (1 - p_y) mu on one qubit, so for y != z
///   (1/4) Tr((sigma_y + sigma_z)^2) = 1/2 + (p_y + p_z)^2 / 8.
inline CQChannel build_large_overlap_channel(const AcceptanceTable& table) {
  const int n = table.num_inputs();
  std::vector<DensityMatrix> sigmas;
  sigmas.reserve(n);
  for (int y = 0; y < n; ++y) {
    const double p = table.prob(y);
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 0.5 * (1.0 + p);
    m(1, 1) = 0.5 * (1.0 - p);
    sigmas.push_back(validate_density(m));
  }
  return CQChannel(std::move(sigmas));
}

// ---------------------------------------------------------------------------
// Promise-gap classification
// ---------------------------------------------------------------------------

enum class ProblemKind { SmallOverlap, LargeOverlap };
enum class Verdict { YesLike, NoLike, Ambiguous };

inline const char* to_string(ProblemKind k) {
  return k == ProblemKind::SmallOverlap ? "SO" : "LO";
}

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::YesLike: return "yes-like";
    case Verdict::NoLike: return "no-like";
    default: return "ambiguous";
  }
}

/// Where a channel sits relative to an overlap promise problem's thresholds.
/// For SO the relevant extremum is the minimum overlap (yes when it is at
/// most 1-c, no when at least 1-s); for LO it is the maximum (yes when at
/// least c, no when at most s).
struct GapReport {
  ProblemKind kind;
  double extremum;
  double yes_value;
  double no_threshold;
  Verdict verdict;
};

inline GapReport classify_instance(const CQChannel& ch, ProblemKind kind,
                                   double c, double s) {
  if (!(c > s)) throw ConfigError("classify_instance: require c > s");
  GapReport report{};
  report.kind = kind;
  if (kind == ProblemKind::SmallOverlap) {
    report.extremum = min_overlap_pair(ch).value;
    report.yes_value = 1.0 - c;
    report.no_threshold = 1.0 - s;
    if (report.extremum <= report.yes_value) {
      report.verdict = Verdict::YesLike;
    } else if (report.extremum >= report.no_threshold) {
      report.verdict = Verdict::NoLike;
    } else {
      report.verdict = Verdict::Ambiguous;
    }
  } else {
    report.extremum = max_overlap_pair(ch).value;
    report.yes_value = c;
    report.no_threshold = s;
    if (report.extremum >= report.yes_value) {
      report.verdict = Verdict::YesLike;
    } else if (report.extremum <= report.no_threshold) {
      report.verdict = Verdict::NoLike;
    } else {
      report.verdict = Verdict::Ambiguous;
    }
  }
  return report;
}

}  // namespace cqoverlap
