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

#include <cstdint>
#include <limits>
#include <vector>

#include "cqoverlap/channel.hpp"
#include "cqoverlap/characterization.hpp"
#include "cqoverlap/core.hpp"
#include "cqoverlap/random.hpp"

namespace cqoverlap {

/// Margins below this flag a counterexample candidate. Looser than the
/// 1e-9 compute tolerance so accumulated roundoff cannot raise false flags;
/// reverify() is the judge for anything flagged.
inline constexpr double kCounterexampleThreshold = -1e-7;

/// Exhaustive minimum over k-subsets of the average pairwise output overlap
/// (1/k(k-1)) sum_{r != s} Tr(sigma_{i_r} sigma_{i_s}). The average is
/// order-invariant, so unordered subsets suffice. For k = 2 this is the
/// smallest off-diagonal Gram entry.
inline double min_subset_average(const CQChannel& ch, int k,
                                 std::uint64_t cap = kDefaultSubsetCap) {
  const int n = ch.input_dim();
  detail::check_subset_args(n, k, cap, "min_subset_average");
  const RMatrix& m = ch.gram().matrix();
  const double denom = static_cast<double>(k) * (k - 1);
  double best = std::numeric_limits<double>::infinity();
  detail::for_each_k_subset(n, k, [&](const std::vector<int>& t) {
    double total = 0.0;
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) total += m(t[a], t[b]);
    }
    best = std::min(best, 2.0 * total / denom);
  });
  return best;
}

/// One scanned instance: the worst (smallest) margin between the sampled
/// average output overlap of a random orthonormal k-tuple and the discrete
/// minimum over index tuples. Everything is recomputable from the seeds.
struct ConjectureRecord {
  std::uint64_t instance_seed;
  int n;
  int d;
  int k;
  double lhs;     // average output overlap of the recorded tuple
  double rhs;     // discrete minimum over k-subsets
  double margin;  // lhs - rhs
  std::uint64_t states_seed;
};

struct ScanParams {
  int n;
  int d;
  int k;
  int instances;
  int tuples_per_instance;
  std::uint64_t seed;
};

/// Samples random channels and random orthonormal k-tuples, recording per
/// instance the minimum margin found. A margin below kCounterexampleThreshold
/// marks the record as a counterexample candidate; candidates must survive
/// reverify() before being reported.
inline std::vector<ConjectureRecord> conjecture_scan(const ScanParams& params) {
  if (params.instances < 1 || params.tuples_per_instance < 1) {
    throw ArityError("conjecture_scan: instances and tuples must be >= 1");
  }
  if (params.k < 2 || params.k > params.n) {
    throw ArityError("conjecture_scan: need 2 <= k <= n");
  }
  std::vector<ConjectureRecord> records;
  records.reserve(params.instances);
  for (int inst = 0; inst < params.instances; ++inst) {
    const std::uint64_t instance_seed = derive_seed(params.seed, inst);
    const CQChannel ch = CQChannel::random(params.n, params.d, instance_seed);
    const double rhs = min_subset_average(ch, params.k);

    ConjectureRecord best{};
    best.instance_seed = instance_seed;
    best.n = params.n;
    best.d = params.d;
    best.k = params.k;
    best.rhs = rhs;
    best.margin = std::numeric_limits<double>::infinity();
    for (int t = 0; t < params.tuples_per_instance; ++t) {
      const std::uint64_t states_seed = derive_seed(instance_seed, t);
      const auto tuple = random_orthonormal_tuple(params.n, params.k, states_seed);
      const double lhs = average_output_overlap(ch, tuple);
      if (lhs - rhs < best.margin) {
        best.lhs = lhs;
        best.margin = lhs - rhs;
        best.states_seed = states_seed;
      }
    }
    records.push_back(best);
  }
  return records;
}

inline bool is_counterexample_candidate(const ConjectureRecord& r) {
  return r.margin < kCounterexampleThreshold;
}

namespace detail {

/// Kahan-compensated sum of the r != s cross terms.
inline double compensated_average_overlap(const CQChannel& ch,
                                          const std::vector<PureState>& states) {
  const int k = static_cast<int>(states.size());
  std::vector<RVector> profiles;
  std::vector<RVector> images;
  profiles.reserve(k);
  images.reserve(k);
  for (const auto& st : states) {
    profiles.push_back(st.moduli_squared());
    images.push_back(ch.gram().matrix() * profiles.back());
  }
  double sum = 0.0, comp = 0.0;
  for (int r = 0; r < k; ++r) {
    for (int s = 0; s < k; ++s) {
      if (r == s) continue;
      const double term = profiles[r].dot(images[s]) - comp;
      const double next = sum + term;
      comp = (next - sum) - term;
      sum = next;
    }
  }
  return sum / (static_cast<double>(k) * (k - 1));
}

inline double compensated_min_subset_average(const CQChannel& ch, int k) {
  const RMatrix& m = ch.gram().matrix();
  const double denom = static_cast<double>(k) * (k - 1);
  double best = std::numeric_limits<double>::infinity();
  for_each_k_subset(ch.input_dim(), k, [&](const std::vector<int>& t) {
    double sum = 0.0, comp = 0.0;
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        if (a == b) continue;
        const double term = m(t[a], t[b]) - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
      }
    }
    best = std::min(best, sum / denom);
  });
  return best;
}

}  // namespace detail

/// Regenerates the instance and tuple from the record's seeds, recomputes
/// both sides with compensated summation, and returns the fresh record.
/// A discrepancy beyond 1e-9 against the stored numbers indicates the record
/// did not come from the claimed seeds and raises ReproducibilityError.
inline ConjectureRecord reverify(const ConjectureRecord& record) {
  const CQChannel ch = CQChannel::random(record.n, record.d, record.instance_seed);
  const auto tuple =
      random_orthonormal_tuple(record.n, record.k, record.states_seed);
  ConjectureRecord fresh = record;
  fresh.lhs = detail::compensated_average_overlap(ch, tuple);
  fresh.rhs = detail::compensated_min_subset_average(ch, record.k);
  fresh.margin = fresh.lhs - fresh.rhs;
  if (std::abs(fresh.lhs - record.lhs) > 1e-9 ||
      std::abs(fresh.rhs - record.rhs) > 1e-9) {
    throw ReproducibilityError(
        "reverify: recomputed values disagree with the record (lhs " +
        std::to_string(fresh.lhs) + " vs " + std::to_string(record.lhs) +
        ", rhs " + std::to_string(fresh.rhs) + " vs " +
        std::to_string(record.rhs) + ")");
  }
  return fresh;
}

}  // namespace cqoverlap
