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
#include <random>
#include <vector>

#include "cqoverlap/core.hpp"

namespace cqoverlap {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministic seed for sub-stream `index` of stream `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

/// Matrix with i.i.d. complex standard normal entries.
inline Matrix ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(r, c) = Complex(re, im);
    }
  }
  return g;
}

/// Random full-rank mixed state G G^dag / Tr(G G^dag), G Ginibre.
inline DensityMatrix random_density(int d, Rng& rng) {
  if (d < 1) throw DimensionError("random_density: d must be >= 1");
  const Matrix g = ginibre(d, d, rng);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  return validate_density(m);
}

inline DensityMatrix random_density(int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_density(d, rng);
}

/// Haar-ish random pure state (normalized complex Gaussian vector).
inline PureState random_pure(int n, Rng& rng) {
  if (n < 1) throw DimensionError("random_pure: n must be >= 1");
  return PureState::normalized(ginibre(n, 1, rng).col(0));
}

inline PureState random_pure(int n, std::uint64_t seed) {
  Rng rng(seed);
  return random_pure(n, rng);
}

/// k pairwise orthonormal states of dimension n, obtained by QR-orthonormalizing
/// k complex Gaussian vectors. Pairwise inner products are below 1e-12.
inline std::vector<PureState> random_orthonormal_tuple(int n, int k, Rng& rng) {
  if (n < 1) throw DimensionError("random_orthonormal_tuple: n must be >= 1");
  if (k < 1 || k > n) {
    throw InfeasibleError("random_orthonormal_tuple: need 1 <= k <= n, got k=" +
                          std::to_string(k) + ", n=" + std::to_string(n));
  }
  const Matrix g = ginibre(n, k, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  std::vector<PureState> out;
  out.reserve(k);
  for (int c = 0; c < k; ++c) {
    out.push_back(PureState::normalized(q.col(c)));
  }
  return out;
}

inline std::vector<PureState> random_orthonormal_tuple(int n, int k,
                                                       std::uint64_t seed) {
  Rng rng(seed);
  return random_orthonormal_tuple(n, k, rng);
}

}  // namespace cqoverlap
