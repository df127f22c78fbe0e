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

#include <array>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "cqoverlap/channel.hpp"
#include "cqoverlap/characterization.hpp"
#include "cqoverlap/core.hpp"
#include "cqoverlap/random.hpp"

namespace cqoverlap {

enum class Direction { Minimize, Maximize };

/// Settings for the continuous search over orthogonal pure-state pairs.
struct OptimizerConfig {
  int restarts = 200;
  int max_iters = 300;
  double step_init = 1.0;
  double grad_tol = 1e-8;
  std::uint64_t seed = 0;
};

/// Extremum found by a search, with the witness pair that attains it.
/// The witnesses are orthogonal to 1e-10 and re-evaluating overlap() on them
/// reproduces `value` to 1e-10.
struct OracleResult {
  double value;
  PureState u;
  PureState v;
  bool converged;
  long iterations_used;
};

/// Free parameters of the orthogonal-pair parametrization: u = x/|x| and
/// v = normalize(y - u <u|y>). Feasibility (unit norms, orthogonality) holds
/// by construction at every point where the projection is non-degenerate.
struct FreePoint {
  CVector x;
  CVector y;
};

namespace detail {

/// Worker count: hardware concurrency, capped by CQOVERLAP_THREADS when set.
inline int worker_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("CQOVERLAP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != nullptr && *end == '\0' && v >= 1 &&
        static_cast<unsigned long>(v) < hw) {
      hw = static_cast<unsigned>(v);
    }
  }
  return static_cast<int>(hw);
}

struct PairEval {
  CVector u;
  CVector v;
  RVector p;
  RVector q;
  double value = 0.0;
};

inline constexpr double kDegenerateRatio = 1e-12;

/// Maps free parameters to the feasible pair and the objective p^T M q.
/// Returns nullopt when x vanishes or y is parallel to u within 1e-12.
inline std::optional<PairEval> evaluate_pair(const RMatrix& m, const CVector& x,
                                             const CVector& y) {
  PairEval e;
  const double xn = x.norm();
  if (!(xn > kDegenerateRatio)) return std::nullopt;
  e.u = x / xn;
  const Complex uy = e.u.dot(y);
  CVector w = y - uy * e.u;
  const double wn = w.norm();
  if (!(wn > kDegenerateRatio * y.norm())) return std::nullopt;
  e.v = w / wn;
  e.p = e.u.cwiseAbs2();
  e.q = e.v.cwiseAbs2();
  e.value = e.p.dot(m * e.q);
  return e;
}

struct PairGradient {
  CVector gx;  // dF/d conj(x); real-coordinate gradient is 2(Re, Im)
  CVector gy;  // dF/d conj(y)
  double norm = 0.0;
};

/// Conjugate-Wirtinger sensitivity of v = w/|w| pulled back through the
/// normalization: dF/d conj(w) given g = dF/d conj(v).
inline CVector normalization_pullback(const CVector& w, double wn, const CVector& g) {
  return g / wn - w * (g.dot(w).real() / (wn * wn * wn));
}

/// Analytic gradient of the objective with respect to the free parameters,
/// validated against central finite differences by gradient_check().
inline PairGradient analytic_gradient(const RMatrix& m, const CVector& x,
                                      const CVector& y, const PairEval& e) {
  const double xn = x.norm();
  const Complex uy = e.u.dot(y);
  const CVector w = y - uy * e.u;
  const double wn = w.norm();

  const RVector mq = m * e.q;
  const RVector mp = m * e.p;

  // Path through q: G_j = (M p)_j v_j, pulled back through v = w/|w|.
  const CVector gv = e.v.cwiseProduct(mp.cast<Complex>());
  const CVector h = normalization_pullback(w, wn, gv);

  PairGradient out;
  // y enters only through w = y - u <u|y>; the pullback is the projector.
  out.gy = h - e.u * e.u.dot(h);
  // u collects the direct path through p and the projection path through w.
  const CVector k =
      e.u.cwiseProduct(mq.cast<Complex>()) - y * h.dot(e.u) - h * y.dot(e.u);
  out.gx = normalization_pullback(x, xn, k);
  out.norm = 2.0 * std::sqrt(out.gx.squaredNorm() + out.gy.squaredNorm());
  return out;
}

struct RestartOutcome {
  bool valid = false;
  double signed_value = std::numeric_limits<double>::infinity();
  PairEval eval;
  bool converged = false;
  long iterations = 0;
};

/// One seeded restart of gradient descent with backtracking line search
/// (halving, Armijo constant 1e-4) on the free parametrization.
inline RestartOutcome run_restart(const RMatrix& m, double sign,
                                  const OptimizerConfig& cfg, std::uint64_t seed) {
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxHalvings = 60;
  const int n = static_cast<int>(m.rows());
  Rng rng(seed);

  RestartOutcome out;
  CVector x = ginibre(n, 1, rng).col(0);
  CVector y = ginibre(n, 1, rng).col(0);
  auto eval = evaluate_pair(m, x, y);
  for (int tries = 0; !eval.has_value() && tries < 100; ++tries) {
    y = ginibre(n, 1, rng).col(0);
    eval = evaluate_pair(m, x, y);
  }
  if (!eval.has_value()) {
    throw OptimizerError("continuous_extremum: could not draw a non-degenerate start");
  }

  double step = cfg.step_init;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    ++out.iterations;
    if (!std::isfinite(eval->value)) {
      throw OptimizerError("continuous_extremum: objective is not finite");
    }
    const PairGradient grad = analytic_gradient(m, x, y, *eval);
    if (grad.norm <= cfg.grad_tol) {
      out.converged = true;
      break;
    }
    // Descend on sign * f; the factor 2 converts Wirtinger to real gradients.
    const double decrease = kArmijo * grad.norm * grad.norm;
    // Warm-started growth lets the accepted step track the inverse local
    // curvature, which keeps the tail linear even for ill-conditioned optima.
    step = std::min(2.0 * step, 1e9);
    bool moved = false;
    for (int h = 0; h < kMaxHalvings; ++h) {
      const CVector xt = x - step * (2.0 * sign) * grad.gx;
      const CVector yt = y - step * (2.0 * sign) * grad.gy;
      const auto trial = evaluate_pair(m, xt, yt);
      if (trial.has_value() &&
          sign * trial->value <= sign * eval->value - step * decrease) {
        x = xt;
        y = yt;
        eval = trial;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // no acceptable step at this scale
  }

  out.valid = true;
  out.signed_value = sign * eval->value;
  out.eval = std::move(*eval);
  return out;
}

}  // namespace detail

/// Continuous local search for the extremum of the output overlap over
/// orthogonal pure pairs, globalized by seeded restarts. Restarts run on
/// independent RNG streams derived from (seed, restart index) and may be
/// partitioned across threads; the best-value merge is deterministic
/// (ties break to the lowest restart index).
inline OracleResult continuous_extremum(const CQChannel& ch, Direction direction,
                                        const OptimizerConfig& cfg) {
  if (ch.input_dim() < 2) throw ArityError("continuous_extremum: need n >= 2");
  if (cfg.restarts < 1 || cfg.max_iters < 1 || !(cfg.step_init > 0.0)) {
    throw ConfigError("continuous_extremum: invalid optimizer configuration");
  }
  const RMatrix& m = ch.gram().matrix();
  const double sign = direction == Direction::Minimize ? 1.0 : -1.0;

  std::vector<detail::RestartOutcome> outcomes(cfg.restarts);
  const int workers = std::min(detail::worker_threads(), cfg.restarts);
  auto run_range = [&](int first) {
    for (int r = first; r < cfg.restarts; r += workers) {
      outcomes[r] = detail::run_restart(m, sign, cfg, derive_seed(cfg.seed, r));
    }
  };
  if (workers == 1) {
    run_range(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(run_range, t);
    for (auto& th : pool) th.join();
  }

  int best = -1;
  long total_iters = 0;
  for (int r = 0; r < cfg.restarts; ++r) {
    total_iters += outcomes[r].iterations;
    if (best < 0 || outcomes[r].signed_value < outcomes[best].signed_value) {
      best = r;
    }
  }
  const detail::PairEval& e = outcomes[best].eval;
  return OracleResult{e.value, PureState::normalized(e.u),
                      PureState::normalized(e.v), outcomes[best].converged,
                      total_iters};
}

namespace detail {

/// Phases closing a polygon with side lengths c (at most 3 nonzero entries,
/// feasible: twice the largest is at most the total).
inline std::array<double, 3> close_polygon3(const std::array<double, 3>& c) {
  std::array<double, 3> theta{0.0, 0.0, 0.0};
  std::vector<int> nz;
  for (int i = 0; i < 3; ++i) {
    if (c[i] > 0.0) nz.push_back(i);
  }
  if (nz.empty()) return theta;
  if (nz.size() == 1) {
    throw OptimizerError("close_polygon3: single nonzero side cannot close");
  }
  if (nz.size() == 2) {
    theta[nz[1]] = M_PI;  // feasibility forces equal lengths
    return theta;
  }
  const double ca = c[nz[0]], cb = c[nz[1]], cc = c[nz[2]];
  const double cos_b = std::clamp((cc * cc - ca * ca - cb * cb) / (2.0 * ca * cb),
                                  -1.0, 1.0);
  const double tb = std::acos(cos_b);
  const Complex z = ca + cb * std::exp(Complex(0.0, tb));
  theta[nz[1]] = tb;
  theta[nz[2]] = std::arg(-z);
  return theta;
}

/// All points of the 2-simplex grid {p : p_i = a_i/res, sum a_i = res},
/// with their entrywise square roots cached.
struct SimplexPoint {
  RVector p;
  RVector sqrt_p;
};

inline std::vector<SimplexPoint> simplex_grid3(int res) {
  std::vector<SimplexPoint> pts;
  pts.reserve(static_cast<std::size_t>(res + 1) * (res + 2) / 2);
  for (int a = 0; a <= res; ++a) {
    for (int b = 0; b <= res - a; ++b) {
      RVector p(3);
      p << static_cast<double>(a) / res, static_cast<double>(b) / res,
          static_cast<double>(res - a - b) / res;
      pts.push_back({p, p.cwiseSqrt()});
    }
  }
  return pts;
}

}  // namespace detail

/// Exhaustive moduli-space scan for n in {2, 3}. The objective depends only
/// on the moduli profiles (p, q); a profile pair is achievable by orthogonal
/// states exactly when the products sqrt(p_i q_i) close a polygon (twice the
/// largest at most the total), so the scan enumerates profile grids under
/// that filter and reconstructs witness phases for the optimum afterwards.
/// For n = 2 orthogonality forces q to be the reversal of p, so the scan is
/// one-dimensional. The result is within O(1/resolution) of the true optimum.
inline OracleResult grid_extremum(const CQChannel& ch, Direction direction,
                                  int resolution) {
  const int n = ch.input_dim();
  if (n != 2 && n != 3) {
    throw CapacityError("grid_extremum: only n in {2, 3} supported, got n=" +
                        std::to_string(n));
  }
  if (resolution < 1 || resolution > 400) {
    throw CapacityError("grid_extremum: resolution must be in [1, 400]");
  }
  const RMatrix& m = ch.gram().matrix();
  const double sign = direction == Direction::Minimize ? 1.0 : -1.0;

  double best_signed = std::numeric_limits<double>::infinity();
  long evaluated = 0;

  if (n == 2) {
    double best_p1 = 0.0;
    for (int a = 0; a <= resolution; ++a) {
      const double p1 = static_cast<double>(a) / resolution;
      RVector p(2), q(2);
      p << p1, 1.0 - p1;
      q << 1.0 - p1, p1;
      const double f = p.dot(m * q);
      ++evaluated;
      if (sign * f < best_signed) {
        best_signed = sign * f;
        best_p1 = p1;
      }
    }
    const double s1 = std::sqrt(best_p1), s2 = std::sqrt(1.0 - best_p1);
    CVector u(2), v(2);
    u << s1, s2;
    v << s2, -s1;
    return OracleResult{sign * best_signed, PureState::normalized(u),
                        PureState::normalized(v), true, evaluated};
  }

  const auto pts = detail::simplex_grid3(resolution);
  int best_pi = -1, best_qi = -1;
  for (std::size_t qi = 0; qi < pts.size(); ++qi) {
    const RVector mq = m * pts[qi].p;
    const RVector& sq = pts[qi].sqrt_p;
    for (std::size_t pi = 0; pi < pts.size(); ++pi) {
      const RVector& sp = pts[pi].sqrt_p;
      const double c0 = sp(0) * sq(0);
      const double c1 = sp(1) * sq(1);
      const double c2 = sp(2) * sq(2);
      const double cmax = std::max({c0, c1, c2});
      if (2.0 * cmax > c0 + c1 + c2) continue;  // not achievable orthogonally
      const double f = pts[pi].p.dot(mq);
      ++evaluated;
      if (sign * f < best_signed) {
        best_signed = sign * f;
        best_pi = static_cast<int>(pi);
        best_qi = static_cast<int>(qi);
      }
    }
  }
  const RVector& sp = pts[best_pi].sqrt_p;
  const RVector& sq = pts[best_qi].sqrt_p;
  const auto theta = detail::close_polygon3(
      {sp(0) * sq(0), sp(1) * sq(1), sp(2) * sq(2)});
  CVector u(3), v(3);
  for (int i = 0; i < 3; ++i) {
    u(i) = sp(i);
    v(i) = sq(i) * std::exp(Complex(0.0, -theta[i]));
  }
  return OracleResult{sign * best_signed, PureState::normalized(u),
                      PureState::normalized(v), true, evaluated};
}

/// Maximum absolute discrepancy between the analytic gradient and central
/// finite differences over all real coordinates of the free point.
inline double gradient_check(const CQChannel& ch, const FreePoint& point,
                             double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-4)) {
    throw ConfigError("gradient_check: eps must lie in [1e-7, 1e-4]");
  }
  const RMatrix& m = ch.gram().matrix();
  const auto base = detail::evaluate_pair(m, point.x, point.y);
  if (!base.has_value()) {
    throw OptimizerError("gradient_check: degenerate point");
  }
  const detail::PairGradient grad =
      detail::analytic_gradient(m, point.x, point.y, *base);

  const int n = static_cast<int>(point.x.size());
  auto value_at = [&](const CVector& x, const CVector& y) {
    const auto e = detail::evaluate_pair(m, x, y);
    if (!e.has_value()) throw OptimizerError("gradient_check: degenerate point");
    return e->value;
  };

  double worst = 0.0;
  // Real coordinates are (Re x, Im x, Re y, Im y); the analytic value for
  // coordinate Re z_i is 2 Re(g_i), for Im z_i it is 2 Im(g_i).
  for (int which = 0; which < 4; ++which) {
    const bool is_x = which < 2;
    const bool is_real = (which % 2) == 0;
    for (int i = 0; i < n; ++i) {
      CVector xp = point.x, xm = point.x, yp = point.y, ym = point.y;
      const Complex bump = is_real ? Complex(eps, 0.0) : Complex(0.0, eps);
      if (is_x) {
        xp(i) += bump;
        xm(i) -= bump;
      } else {
        yp(i) += bump;
        ym(i) -= bump;
      }
      const double numeric =
          (value_at(xp, yp) - value_at(xm, ym)) / (2.0 * eps);
      const Complex g = is_x ? grad.gx(i) : grad.gy(i);
      const double analytic = 2.0 * (is_real ? g.real() : g.imag());
      worst = std::max(worst, std::abs(numeric - analytic));
    }
  }
  return worst;
}

}  // namespace cqoverlap
