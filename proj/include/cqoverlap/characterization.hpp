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

#include <algorithm>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "cqoverlap/channel.hpp"
#include "cqoverlap/core.hpp"

namespace cqoverlap {

/// Hard cap on exhaustive k-subset enumeration. Exceeding it raises
/// CapacityError rather than falling back to a heuristic.
inline constexpr std::uint64_t kDefaultSubsetCap = 1000000;

// ---------------------------------------------------------------------------
// Optimal basis pairs
// ---------------------------------------------------------------------------

/// An extremal value together with the basis pair (0-based, i < j) and the
/// explicit orthogonal witness states that attain it.
struct PairOptimum {
  double value;
  int i;
  int j;
  PureState witness_u;
  PureState witness_v;
};

/// Minimum output overlap over orthogonal pure inputs. The optimum is
/// attained by a computational basis pair, so this is the smallest
/// off-diagonal Gram entry; ties break to the lexicographically smallest
/// (i, j).
inline PairOptimum min_overlap_pair(const CQChannel& ch) {
  const int n = ch.input_dim();
  if (n < 2) throw ArityError("min_overlap_pair: need n >= 2");
  const RMatrix& m = ch.gram().matrix();
  int bi = 0, bj = 1;
  double best = m(0, 1);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (m(i, j) < best) {
        best = m(i, j);
        bi = i;
        bj = j;
      }
    }
  }
  return PairOptimum{best, bi, bj, PureState::basis(n, bi), PureState::basis(n, bj)};
}

/// Maximum output overlap over orthogonal pure inputs: the best value of
/// (1/4) Tr((sigma_i + sigma_j)^2) over distinct pairs, attained exactly by
/// the witnesses (|i> + |j>)/sqrt(2) and (|i> - |j>)/sqrt(2).
inline PairOptimum max_overlap_pair(const CQChannel& ch) {
  const int n = ch.input_dim();
  if (n < 2) throw ArityError("max_overlap_pair: need n >= 2");
  const RMatrix& m = ch.gram().matrix();
  int bi = 0, bj = 1;
  double best = 0.25 * (m(0, 0) + m(1, 1) + 2.0 * m(0, 1));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.25 * (m(i, i) + m(j, j) + 2.0 * m(i, j));
      if (v > best) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CVector up = CVector::Zero(n);
  CVector vm = CVector::Zero(n);
  up(bi) = inv_sqrt2;
  up(bj) = inv_sqrt2;
  vm(bi) = inv_sqrt2;
  vm(bj) = -inv_sqrt2;
  return PairOptimum{best, bi, bj, PureState(std::move(up)), PureState(std::move(vm))};
}

/// Smallest pairwise output overlap min_{i != j} Tr(sigma_i sigma_j).
inline double min_pairwise_overlap(const CQChannel& ch) {
  return min_overlap_pair(ch).value;
}

// ---------------------------------------------------------------------------
// Lower bound for non-orthogonal inputs
// ---------------------------------------------------------------------------

/// Slack term quantifying how much the inputs' non-orthogonality can erode
/// the minimum-overlap guarantee:
///   max_j |a_j||b_j| |<u|v>| / (sum_{i != j} |a_i||b_i| + |<u|v>|),
/// and 0 when the states are orthogonal (|<u|v>| <= 1e-12). Always in [0, 1].
inline double nonorthogonality_slack(const PureState& u, const PureState& v) {
  detail::require_same_dim(u.dim(), v.dim(), "nonorthogonality_slack");
  const double ip = std::abs(inner(u, v));
  if (ip <= kOrthoTol) return 0.0;
  const int n = u.dim();
  RVector ab(n);
  for (int i = 0; i < n; ++i) {
    ab(i) = std::abs(u.amplitudes()(i)) * std::abs(v.amplitudes()(i));
  }
  double best = 0.0;
  for (int j = 0; j < n; ++j) {
    double rest = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i != j) rest += ab(i);
    }
    best = std::max(best, ab(j) * ip / (rest + ip));
  }
  return std::min(best, 1.0);
}

/// Guaranteed lower bound for the output overlap of arbitrary pure inputs.
struct OverlapLowerBound {
  double min_pairwise;  // smallest off-diagonal Gram entry
  double slack;         // non-orthogonality slack in [0, 1]
  double bound;         // min_pairwise * (1 - slack^2)
};

inline OverlapLowerBound overlap_lower_bound(const CQChannel& ch,
                                             const PureState& u,
                                             const PureState& v) {
  detail::require_same_dim(u.dim(), ch.input_dim(), "overlap_lower_bound: u");
  detail::require_same_dim(v.dim(), ch.input_dim(), "overlap_lower_bound: v");
  const double mp = min_pairwise_overlap(ch);
  const double slack = nonorthogonality_slack(u, v);
  return OverlapLowerBound{mp, slack, mp * (1.0 - slack * slack)};
}

// ---------------------------------------------------------------------------
// k-subset enumeration
// ---------------------------------------------------------------------------

namespace detail {

/// C(n, k), saturating at uint64 max.
inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    if (result > std::numeric_limits<std::uint64_t>::max() / num) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = result * num / static_cast<std::uint64_t>(i);
  }
  return result;
}

/// Calls fn(subset) for every k-subset of {0..n-1} in lexicographic order.
template <typename Fn>
void for_each_k_subset(int n, int k, Fn&& fn) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
}

inline void check_subset_args(int n, int k, std::uint64_t cap, const char* what) {
  if (k < 2 || k > n) {
    throw ArityError(std::string(what) + ": need 2 <= k <= n, got k=" +
                     std::to_string(k) + ", n=" + std::to_string(n));
  }
  const std::uint64_t count = binomial(n, k);
  if (count > cap) {
    throw CapacityError(std::string(what) + ": C(" + std::to_string(n) + "," +
                        std::to_string(k) + ") = " + std::to_string(count) +
                        " exceeds enumeration cap " + std::to_string(cap));
  }
}

/// sum_{i,j in T} M_ij; the quadratic form at the 0/1 indicator of T.
inline double subset_quadratic_sum(const RMatrix& m, const std::vector<int>& t) {
  double total = 0.0;
  for (int a : t) {
    for (int b : t) total += m(a, b);
  }
  return total;
}

}  // namespace detail

/// An optimal k-subset with its (1/k^2)-scaled value.
struct SubsetOptimum {
  double value;             // (1/k^2) Tr((sum_{i in T} sigma_i)^2)
  std::vector<int> subset;  // 0-based indices, ascending
};

/// Exhaustive maximum over k-subsets of the purity of the uniform mixture
/// (1/k) sum_{i in T} sigma_i, i.e. max (1/k^2) Tr((sum sigma_i)^2). This is
/// the upper bound for the average pairwise output overlap of any k pairwise
/// orthogonal inputs. Lexicographically smallest optimal subset wins ties.
inline SubsetOptimum max_subset_purity(const CQChannel& ch, int k,
                                       std::uint64_t cap = kDefaultSubsetCap) {
  const int n = ch.input_dim();
  detail::check_subset_args(n, k, cap, "max_subset_purity");
  const RMatrix& m = ch.gram().matrix();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> best_subset;
  detail::for_each_k_subset(n, k, [&](const std::vector<int>& t) {
    const double g = detail::subset_quadratic_sum(m, t);
    if (g > best) {
      best = g;
      best_subset = t;
    }
  });
  return SubsetOptimum{best / (static_cast<double>(k) * k), std::move(best_subset)};
}

/// One Schur-Horn polytope vertex (0/1 indicator of a k-subset) and the
/// quadratic form value g(v_T) = sum_{i,j in T} M_ij at it.
struct VertexValue {
  std::vector<int> subset;
  double value;
};

/// Evaluates the Gram quadratic form at every 0/1 vertex of the Schur-Horn
/// polytope (all k-subsets, lexicographic order). The maximum of the list is
/// k^2 times max_subset_purity; both use the same per-subset summation.
inline std::vector<VertexValue> subset_vertex_values(
    const CQChannel& ch, int k, std::uint64_t cap = kDefaultSubsetCap) {
  const int n = ch.input_dim();
  detail::check_subset_args(n, k, cap, "subset_vertex_values");
  const RMatrix& m = ch.gram().matrix();
  std::vector<VertexValue> out;
  out.reserve(static_cast<std::size_t>(detail::binomial(n, k)));
  detail::for_each_k_subset(n, k, [&](const std::vector<int>& t) {
    out.push_back(VertexValue{t, detail::subset_quadratic_sum(m, t)});
  });
  return out;
}

// ---------------------------------------------------------------------------
// Exchange identity
// ---------------------------------------------------------------------------

/// Both sides of the exchange identity
///   Tr(sum_i |a_i|^2 S_i sum_j |b_j|^2 S_j) - Tr((sum_i |a_i||b_i| S_i)^2)
///     = (1/2) sum_{i,j} (|a_i||b_j| - |a_j||b_i|)^2 Tr(S_i S_j),
/// evaluated independently for direct comparison.
inline std::pair<double, double> exchange_identity_sides(
    const CVector& alphas, const CVector& betas,
    const std::vector<DensityMatrix>& sigmas) {
  const int k = static_cast<int>(sigmas.size());
  if (alphas.size() != k || betas.size() != k) {
    throw ArityError("exchange_identity_sides: coefficient/state count mismatch");
  }
  if (k == 0) return {0.0, 0.0};
  const int d = sigmas.front().dim();
  for (const auto& s : sigmas) {
    detail::require_same_dim(s.dim(), d, "exchange_identity_sides");
  }
  RVector a(k), b(k);
  for (int i = 0; i < k; ++i) {
    a(i) = std::abs(alphas(i));
    b(i) = std::abs(betas(i));
  }

  Matrix weighted_a = Matrix::Zero(d, d);
  Matrix weighted_b = Matrix::Zero(d, d);
  Matrix weighted_ab = Matrix::Zero(d, d);
  for (int i = 0; i < k; ++i) {
    weighted_a += a(i) * a(i) * sigmas[i].matrix();
    weighted_b += b(i) * b(i) * sigmas[i].matrix();
    weighted_ab += a(i) * b(i) * sigmas[i].matrix();
  }
  const double lhs = (weighted_a * weighted_b).trace().real() -
                     (weighted_ab * weighted_ab).trace().real();

  double rhs = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double c = a(i) * b(j) - a(j) * b(i);
      if (c == 0.0) continue;
      rhs += c * c * hs_overlap(sigmas[i], sigmas[j]);
    }
  }
  rhs *= 0.5;
  return {lhs, rhs};
}

}  // namespace cqoverlap
