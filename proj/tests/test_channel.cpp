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

#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "cqoverlap/channel.hpp"
#include "cqoverlap/characterization.hpp"
#include "cqoverlap/core.hpp"
#include "cqoverlap/random.hpp"

using namespace cqoverlap;

namespace {

PureState plus_state() {
  CVector v(2);
  v << 1.0, 1.0;
  return PureState::normalized(v);
}

PureState minus_state() {
  CVector v(2);
  v << 1.0, -1.0;
  return PureState::normalized(v);
}

}  // namespace

TEST_CASE("channel construction enforces arity and dimensions") {
  std::vector<DensityMatrix> one{DensityMatrix::maximally_mixed(2)};
  CHECK_THROWS_AS(CQChannel(std::move(one)), ArityError);

  std::vector<DensityMatrix> mixed_dims{DensityMatrix::maximally_mixed(2),
                                        DensityMatrix::maximally_mixed(3)};
  CHECK_THROWS_AS(CQChannel(std::move(mixed_dims)), DimensionError);
}

TEST_CASE("apply reproduces the defining action") {
  const auto ch = CQChannel::random(3, 2, 11);

  SECTION("basis input returns sigma_i exactly") {
    for (int i = 0; i < 3; ++i) {
      const auto out = apply(ch, DensityMatrix::basis_projector(3, i));
      CHECK((out.matrix() - ch.sigma(i).matrix()).cwiseAbs().maxCoeff() <= 1e-15);
    }
  }

  SECTION("maximally mixed input yields the average output") {
    const auto out = apply(ch, DensityMatrix::maximally_mixed(3));
    Matrix avg = Matrix::Zero(2, 2);
    for (int i = 0; i < 3; ++i) avg += ch.sigma(i).matrix();
    avg /= 3.0;
    CHECK((out.matrix() - avg).cwiseAbs().maxCoeff() <= 1e-15);
  }

  SECTION("dimension mismatch") {
    CHECK_THROWS_AS(apply(ch, DensityMatrix::maximally_mixed(2)), DimensionError);
  }
}

TEST_CASE("apply on the uniform superposition averages two outputs") {
  const auto ch = CQChannel::random(2, 3, 5);
  const auto out = apply(ch, plus_state().projector());
  const Matrix expected = 0.5 * (ch.sigma(0).matrix() + ch.sigma(1).matrix());
  CHECK((out.matrix() - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("apply preserves trace and positivity on random inputs") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const int d = 2 + static_cast<int>(rng() % 3);
    const auto ch = CQChannel::random(n, d, rng());
    const auto rho = random_density(n, rng);
    // validate_density inside apply() enforces trace and PSD to 1e-10.
    CHECK_NOTHROW(apply(ch, rho));
  }
}

TEST_CASE("gram matrix of named channels") {
  SECTION("basis channel has identity gram") {
    const auto ch = CQChannel::basis(4);
    CHECK((ch.gram().matrix() - RMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("identical pure outputs give the all-ones gram") {
    std::vector<DensityMatrix> sigmas(3, DensityMatrix::basis_projector(2, 0));
    const CQChannel ch(std::move(sigmas));
    CHECK((ch.gram().matrix() - RMatrix::Ones(3, 3)).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("random gram is PSD") {
    const auto ch = CQChannel::random(4, 3, 11);
    CHECK(ch.gram().min_eigenvalue() >= -1e-10);
  }

  SECTION("gram diagonal carries purities in [1/d, 1]") {
    const auto ch = CQChannel::random(5, 3, 23);
    for (int i = 0; i < 5; ++i) {
      CHECK(ch.gram()(i, i) >= 1.0 / 3.0 - 1e-12);
      CHECK(ch.gram()(i, i) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("overlap via gram on hand-checkable cases") {
  const auto basis = CQChannel::basis(2);
  CHECK(overlap(basis, PureState::basis(2, 0), PureState::basis(2, 1)) == 0.0);
  CHECK(overlap(basis, plus_state(), minus_state()) ==
        Catch::Approx(0.5).margin(1e-12));

  const auto ch = CQChannel::random(4, 2, 17);
  for (int i = 0; i < 4; ++i) {
    const auto e = PureState::basis(4, i);
    CHECK(overlap(ch, e, e) == Catch::Approx(purity(ch.sigma(i))).margin(1e-12));
  }

  const auto big = CQChannel::basis(3);
  CHECK(overlap(big, PureState::basis(3, 1), PureState::basis(3, 2)) == 0.0);
  CHECK_THROWS_AS(overlap(big, PureState::basis(2, 0), PureState::basis(3, 1)),
                  DimensionError);
}

TEST_CASE("two-path overlap equality on random inputs") {
  Rng rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const int d = 2 + static_cast<int>(rng() % 3);
    const auto ch = CQChannel::random(n, d, rng());
    const auto u = random_pure(n, rng);
    const auto v = random_pure(n, rng);
    const double via_gram = overlap(ch, u, v);
    const double via_outputs =
        hs_overlap(apply(ch, u.projector()), apply(ch, v.projector()));
    REQUIRE(std::abs(via_gram - via_outputs) <= 1e-10);
  }
}

TEST_CASE("overlap is invariant under amplitude phases") {
  Rng rng(43);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const auto ch = CQChannel::random(n, 2, rng());
    const auto u = random_pure(n, rng);
    const auto v = random_pure(n, rng);
    const double base = overlap(ch, u, v);

    CVector ua = u.amplitudes();
    CVector va = v.amplitudes();
    ua(static_cast<int>(rng() % n)) *= std::exp(Complex(0.0, angle(rng)));
    va(static_cast<int>(rng() % n)) *= std::exp(Complex(0.0, angle(rng)));
    const double rotated = overlap(ch, PureState(ua), PureState(va));
    REQUIRE(std::abs(base - rotated) <= 1e-12);
  }
}

TEST_CASE("average_output_overlap agrees with overlap at k = 2") {
  Rng rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const auto ch = CQChannel::random(n, 2, rng());
    const auto pair = random_orthonormal_tuple(n, 2, rng);
    const double avg = average_output_overlap(ch, pair);
    const double direct = overlap(ch, pair[0], pair[1]);
    REQUIRE(std::abs(avg - direct) <= 1e-12);
  }
}

TEST_CASE("average_output_overlap special profiles") {
  SECTION("fewer than two states") {
    const auto ch = CQChannel::basis(3);
    std::vector<PureState> one{PureState::basis(3, 0)};
    CHECK_THROWS_AS(average_output_overlap(ch, one), ArityError);
  }

  SECTION("identical moduli profiles collapse to p^T M p") {
    const auto ch = CQChannel::random(3, 2, 53);
    // Three states sharing the uniform moduli profile but different phases.
    const double amp = 1.0 / std::sqrt(3.0);
    std::vector<PureState> states;
    for (int r = 0; r < 3; ++r) {
      CVector v(3);
      for (int i = 0; i < 3; ++i) {
        v(i) = amp * std::exp(Complex(0.0, 2.0 * M_PI * r * i / 3.0));
      }
      states.push_back(PureState(v));
    }
    RVector p = RVector::Constant(3, 1.0 / 3.0);
    const double expected = p.dot(ch.gram().matrix() * p);
    CHECK(average_output_overlap(ch, states) == Catch::Approx(expected).margin(1e-12));
  }

  SECTION("basis channel on basis tuples gives zero") {
    const auto ch = CQChannel::basis(5);
    std::vector<PureState> states;
    for (int i = 0; i < 4; ++i) states.push_back(PureState::basis(5, i));
    CHECK(average_output_overlap(ch, states) == 0.0);
  }
}

TEST_CASE("exchange identity holds on random data") {
  Rng rng(61);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 4);
    const int d = 2 + static_cast<int>(rng() % 3);
    std::vector<DensityMatrix> sigmas;
    for (int i = 0; i < k; ++i) sigmas.push_back(random_density(d, rng));
    const CVector alphas = ginibre(k, 1, rng).col(0);
    const CVector betas = ginibre(k, 1, rng).col(0);
    const auto [lhs, rhs] = exchange_identity_sides(alphas, betas, sigmas);
    REQUIRE(std::abs(lhs - rhs) <= 1e-9);
  }
}
