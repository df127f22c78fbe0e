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
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace cqoverlap {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;   // dense complex, the carrier for all states
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Absolute tolerance for state invariants (Hermiticity, PSD, trace, norm).
/// Double-precision eigensolvers bottom out near 1e-12; 1e-10 leaves margin.
inline constexpr double kStateTol = 1e-10;

/// Cutoff below which two pure states count as orthogonal.
inline constexpr double kOrthoTol = 1e-12;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Requested tuple/subset arity is out of range (k < 2, i == j, ...).
class ArityError : public Error {
 public:
  using Error::Error;
};

/// Requested more orthonormal vectors than the dimension admits.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration would exceed the configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class WitnessError : public Error {
 public:
  using Error::Error;
};

class TableError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class OptimizerError : public Error {
 public:
  using Error::Error;
};

class ReproducibilityError : public Error {
 public:
  using Error::Error;
};

/// Base for density-matrix invariant violations; subclasses name the first
/// violated invariant and carry the offending quantity.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class NotHermitianError : public ValidationError {
 public:
  explicit NotHermitianError(double deviation)
      : ValidationError("matrix is not Hermitian: max |M - M^dag| entry = " +
                        std::to_string(deviation)),
        deviation_(deviation) {}
  double deviation() const { return deviation_; }

 private:
  double deviation_;
};

class NotPSDError : public ValidationError {
 public:
  explicit NotPSDError(double min_eigenvalue)
      : ValidationError("matrix is not PSD: min eigenvalue = " +
                        std::to_string(min_eigenvalue)),
        min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

class TraceNotOneError : public ValidationError {
 public:
  explicit TraceNotOneError(double trace)
      : ValidationError("trace = " + std::to_string(trace) + ", expected 1"),
        trace_(trace) {}
  double trace() const { return trace_; }

 private:
  double trace_;
};

namespace detail {

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    std::ostringstream oss;
    oss << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw DimensionError(oss.str());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// DensityMatrix
// ---------------------------------------------------------------------------

/// A d x d Hermitian PSD unit-trace matrix. Instances are validated on
/// construction and immutable afterwards; the stored matrix is the
/// symmetrized (M + M^dag)/2, so Hermiticity holds to machine precision.
class DensityMatrix {
 public:
  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }

  /// The maximally mixed state I/d.
  static DensityMatrix maximally_mixed(int d) {
    if (d < 1) throw DimensionError("maximally_mixed: d must be >= 1");
    Matrix m = Matrix::Identity(d, d) / static_cast<double>(d);
    return DensityMatrix(std::move(m));
  }

  /// The basis projector |i><i| in dimension d.
  static DensityMatrix basis_projector(int d, int i) {
    if (d < 1) throw DimensionError("basis_projector: d must be >= 1");
    if (i < 0 || i >= d) throw DimensionError("basis_projector: index out of range");
    Matrix m = Matrix::Zero(d, d);
    m(i, i) = Complex(1.0, 0.0);
    return DensityMatrix(std::move(m));
  }

 private:
  explicit DensityMatrix(Matrix m) : mat_(std::move(m)) {}
  Matrix mat_;

  friend DensityMatrix validate_density(const Matrix&, double);
};

/// Checks the three state invariants in order (Hermitian, unit trace, PSD)
/// and returns the checked state, or throws naming the first violation.
inline DensityMatrix validate_density(const Matrix& m, double tol = kStateTol) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw DimensionError("validate_density: matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw ValidationError("validate_density: matrix has non-finite entries");
  }
  const double herm_dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > tol) throw NotHermitianError(herm_dev);
  const double trace = m.trace().real();
  if (std::abs(trace - 1.0) > tol) throw TraceNotOneError(trace);
  Matrix sym = 0.5 * (m + m.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol) throw NotPSDError(min_eig);
  return DensityMatrix(std::move(sym));
}

// ---------------------------------------------------------------------------
// PureState
// ---------------------------------------------------------------------------

/// A unit-norm complex amplitude vector.
class PureState {
 public:
  explicit PureState(CVector amplitudes, double tol = kStateTol)
      : amps_(std::move(amplitudes)) {
    if (amps_.size() < 1) throw DimensionError("PureState: empty amplitude vector");
    if (!amps_.allFinite()) throw ValidationError("PureState: non-finite amplitudes");
    const double norm = amps_.norm();
    if (std::abs(norm - 1.0) > tol) {
      throw ValidationError("PureState: norm = " + std::to_string(norm) +
                            ", expected 1");
    }
  }

  static PureState basis(int n, int i) {
    if (n < 1) throw DimensionError("PureState::basis: n must be >= 1");
    if (i < 0 || i >= n) throw DimensionError("PureState::basis: index out of range");
    CVector v = CVector::Zero(n);
    v(i) = Complex(1.0, 0.0);
    return PureState(std::move(v));
  }

  /// Scales an arbitrary nonzero vector to unit norm.
  static PureState normalized(const CVector& raw) {
    const double norm = raw.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw ValidationError("PureState::normalized: vector has no usable norm");
    }
    return PureState(raw / norm);
  }

  int dim() const { return static_cast<int>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }

  /// The rank-one projector |psi><psi|.
  DensityMatrix projector() const {
    return validate_density(amps_ * amps_.adjoint());
  }

  /// Entrywise |amplitude|^2, a probability vector.
  RVector moduli_squared() const { return amps_.cwiseAbs2(); }

 private:
  CVector amps_;
};

/// <a|b>, conjugate-linear in the first argument.
inline Complex inner(const PureState& a, const PureState& b) {
  detail::require_same_dim(a.dim(), b.dim(), "inner");
  return a.amplitudes().dot(b.amplitudes());
}

// ---------------------------------------------------------------------------
// Scalar functionals
// ---------------------------------------------------------------------------

/// Hilbert-Schmidt overlap Tr(rho sigma). For Hermitian arguments this equals
/// sum_ij rho_ij * conj(sigma_ij), which makes the result exactly symmetric
/// in its arguments at the bit level.
inline double hs_overlap(const DensityMatrix& rho, const DensityMatrix& sigma) {
  detail::require_same_dim(rho.dim(), sigma.dim(), "hs_overlap");
  const Complex tr =
      (rho.matrix().array() * sigma.matrix().array().conjugate()).sum();
  if (std::abs(tr.imag()) > kStateTol) {
    throw ValidationError("hs_overlap: imaginary part " +
                          std::to_string(tr.imag()) + " exceeds tolerance");
  }
  return tr.real();
}

/// Purity Tr(rho^2), in [1/d, 1].
inline double purity(const DensityMatrix& rho) { return hs_overlap(rho, rho); }

}  // namespace cqoverlap
