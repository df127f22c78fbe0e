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
#include <utility>
#include <vector>

#include "cqoverlap/core.hpp"
#include "cqoverlap/random.hpp"

namespace cqoverlap {

/// Real symmetric matrix of pairwise Hilbert-Schmidt overlaps
/// M_ij = Tr(sigma_i sigma_j). Symmetry is exact by construction; positive
/// semidefiniteness holds mathematically and is checked by tests, not here.
class GramMatrix {
 public:
  explicit GramMatrix(RMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1) {
      throw DimensionError("GramMatrix: must be square and non-empty");
    }
  }

  int size() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const RMatrix& matrix() const { return m_; }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

 private:
  RMatrix m_;
};

/// A classical-quantum channel: measure the input in the computational basis,
/// emit sigma_i on outcome i. Specified by an ordered list of n >= 2 output
/// states of common dimension d. The Gram matrix of the outputs is computed
/// once at construction; instances are immutable.
class CQChannel {
 public:
  explicit CQChannel(std::vector<DensityMatrix> sigmas)
      : sigmas_(std::move(sigmas)), gram_(build_gram(sigmas_)) {}

  /// sigma_i = |i><i| in C^n (so d = n); pairwise output overlaps all vanish.
  static CQChannel basis(int n) {
    if (n < 2) throw ArityError("CQChannel::basis: need n >= 2");
    std::vector<DensityMatrix> sigmas;
    sigmas.reserve(n);
    for (int i = 0; i < n; ++i) sigmas.push_back(DensityMatrix::basis_projector(n, i));
    return CQChannel(std::move(sigmas));
  }

  /// n seeded Ginibre states of dimension d, drawn from one generator stream.
  static CQChannel random(int n, int d, std::uint64_t seed) {
    if (n < 2) throw ArityError("CQChannel::random: need n >= 2");
    Rng rng(seed);
    std::vector<DensityMatrix> sigmas;
    sigmas.reserve(n);
    for (int i = 0; i < n; ++i) sigmas.push_back(random_density(d, rng));
    return CQChannel(std::move(sigmas));
  }

  int input_dim() const { return static_cast<int>(sigmas_.size()); }
  int output_dim() const { return sigmas_.front().dim(); }
  const DensityMatrix& sigma(int i) const { return sigmas_.at(i); }
  const std::vector<DensityMatrix>& sigmas() const { return sigmas_; }
  const GramMatrix& gram() const { return gram_; }

 private:
  static GramMatrix build_gram(const std::vector<DensityMatrix>& sigmas) {
    if (sigmas.size() < 2) {
      throw ArityError("CQChannel: need at least 2 output states");
    }
    const int n = static_cast<int>(sigmas.size());
    const int d = sigmas.front().dim();
    for (const auto& s : sigmas) {
      detail::require_same_dim(s.dim(), d, "CQChannel output states");
    }
    RMatrix g(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double v = hs_overlap(sigmas[i], sigmas[j]);
        g(i, j) = v;
        g(j, i) = v;
      }
    }
    return GramMatrix(std::move(g));
  }

  std::vector<DensityMatrix> sigmas_;
  GramMatrix gram_;
};

/// Channel action sum_i rho_ii sigma_i; the diagonal of a valid input state
/// is a probability vector, so the output is again a valid state.
inline DensityMatrix apply(const CQChannel& ch, const DensityMatrix& rho) {
  detail::require_same_dim(rho.dim(), ch.input_dim(), "apply");
  const int n = ch.input_dim();
  const int d = ch.output_dim();
  Matrix out = Matrix::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    out += rho.matrix()(i, i).real() * ch.sigma(i).matrix();
  }
  return validate_density(out);
}

/// Output overlap Tr(Phi(|u><u|) Phi(|v><v|)) computed through the Gram
/// matrix as p^T M q with p, q the moduli-squared profiles of u, v. Agrees
/// with the direct route through apply() to 1e-10; costs O(n^2) instead of
/// materializing d x d outputs. Orthogonality of u and v is not required.
inline double overlap(const CQChannel& ch, const PureState& u, const PureState& v) {
  detail::require_same_dim(u.dim(), ch.input_dim(), "overlap: u");
  detail::require_same_dim(v.dim(), ch.input_dim(), "overlap: v");
  const RVector p = u.moduli_squared();
  const RVector q = v.moduli_squared();
  return p.dot(ch.gram().matrix() * q);
}

/// Average pairwise output overlap of k >= 2 input states:
/// (1/k(k-1)) sum_{r != s} Tr(A_r A_s) with A_r the channel output for the
/// r-th state. For k = 2 this coincides with overlap().
inline double average_output_overlap(const CQChannel& ch,
                                     const std::vector<PureState>& states) {
  const int k = static_cast<int>(states.size());
  if (k < 2) throw ArityError("average_output_overlap: need at least 2 states");
  const int n = ch.input_dim();
  std::vector<RVector> profiles;
  std::vector<RVector> images;  // M p_r
  profiles.reserve(k);
  images.reserve(k);
  for (const auto& s : states) {
    detail::require_same_dim(s.dim(), n, "average_output_overlap");
    profiles.push_back(s.moduli_squared());
    images.push_back(ch.gram().matrix() * profiles.back());
  }
  double total = 0.0;
  for (int r = 0; r < k; ++r) {
    for (int s = 0; s < k; ++s) {
      if (r == s) continue;
      total += profiles[r].dot(images[s]);
    }
  }
  return total / (static_cast<double>(k) * (k - 1));
}

}  // namespace cqoverlap
