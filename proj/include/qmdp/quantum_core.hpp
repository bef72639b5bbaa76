// Copyright 2026 The qmdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qmdp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Numerical slack used when checking operator invariants.
struct Tolerances {
  double hermitian_tol = 1e-9;
  double trace_tol = 1e-9;
  double psd_tol = 1e-9;
  double tp_tol = 1e-9;

  /// Throws std::invalid_argument if any tolerance is negative.
  void check() const;
};

// ---------------------------------------------------------------------------
// Raw matrix helpers

Matrix tensor_product(const Matrix& a, const Matrix& b);

/// |i><j| in dimension `dim`.
Matrix matrix_unit(std::size_t dim, std::size_t i, std::size_t j);

/// Largest |m_ij - conj(m_ji)|.
double hermitian_residual(const Matrix& m);

/// Smallest eigenvalue of the Hermitian part (m + m^dagger) / 2.
double min_hermitian_eigenvalue(const Matrix& m);

/// Largest absolute off-diagonal entry.
double max_off_diagonal(const Matrix& m);

enum class TraceSide {
  trace_second,  ///< input lives on H_keep (x) H_out, H_out is traced
  trace_first,   ///< input lives on H_out (x) H_keep, H_out is traced
};

Matrix partial_trace(const Matrix& m, std::size_t dim_keep, std::size_t dim_out,
                     TraceSide side = TraceSide::trace_second);

// ---------------------------------------------------------------------------
// Domain types

/// Positive semi-definite, unit-trace operator. Immutable.
class DensityOperator {
 public:
  /// Validates Hermiticity, trace and positivity against `tol`; throws
  /// std::invalid_argument on failure.
  explicit DensityOperator(Matrix m, const Tolerances& tol = {});

  static DensityOperator pure(const Vector& psi);
  static DensityOperator basis_state(std::size_t dim, std::size_t index);
  static DensityOperator maximally_mixed(std::size_t dim);
  static DensityOperator diagonal(std::span<const double> weights);

  /// Wraps the image of a CPTP map. The matrix is re-symmetrized and
  /// trace-renormalized; a trace correction above 1e-6 throws
  /// std::runtime_error. Positivity is not re-checked.
  static DensityOperator from_channel_output(Matrix m);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

 private:
  struct Trusted {};
  DensityOperator(Matrix m, Trusted) : m_(std::move(m)) {}

  Matrix m_;
};

/// Hermitian operator used as a cost or observable.
class HermitianObservable {
 public:
  explicit HermitianObservable(Matrix m, const Tolerances& tol = {});

  static HermitianObservable identity(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

/// Completely positive map rho -> sum_l K_l rho K_l^dagger from H_in to H_out.
///
/// The constructor only checks shapes, so trace-non-preserving lists (for
/// example {I, I}) can be represented and then rejected by validate_channel.
/// All named constructors in this library return CPTP channels.
class KrausChannel {
 public:
  KrausChannel(std::size_t in_dim, std::size_t out_dim, std::vector<Matrix> kraus);

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }

  /// Applies the map to an arbitrary in_dim x in_dim operator.
  Matrix apply(const Matrix& m) const;

  /// Heisenberg-picture action sum_l K_l^dagger m K_l.
  Matrix adjoint_apply(const Matrix& m) const;

 private:
  std::size_t in_dim_;
  std::size_t out_dim_;
  std::vector<Matrix> kraus_;
};

/// A linear map on operators given by its action. Used for maps with no
/// Kraus form, such as the transpose.
using LinearMap = std::function<Matrix(const Matrix&)>;

struct ValidationReport {
  double completeness_residual = 0.0;  ///< ||sum K^dagger K - I||_F
  double choi_min_eigenvalue = 0.0;
  bool trace_preserving = false;
  bool completely_positive = false;

  bool ok() const { return trace_preserving && completely_positive; }
};

// ---------------------------------------------------------------------------
// Operations

DensityOperator apply_channel(const KrausChannel& ch, const DensityOperator& rho);

/// Channel with Kraus set {K_o K_i}; acts as outer after inner.
KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner);

DensityOperator partial_trace(const DensityOperator& sigma, std::size_t dim_keep,
                              std::size_t dim_out,
                              TraceSide side = TraceSide::trace_second);

/// sum_ij |i><j| (x) N(|i><j|).
Matrix choi_matrix(const KrausChannel& ch);
Matrix choi_matrix(const LinearMap& map, std::size_t in_dim, std::size_t out_dim);

ValidationReport validate_channel(const KrausChannel& ch, const Tolerances& tol = {});

/// Trace preservation is measured through the Choi matrix as
/// ||Tr_out(J) - I||_F, so maps without a Kraus form can be checked.
ValidationReport validate_linear_map(const LinearMap& map, std::size_t in_dim,
                                     std::size_t out_dim, const Tolerances& tol = {});

struct DensityReport {
  double hermitian_residual = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  bool ok = false;
};

DensityReport validate_density(const Matrix& m, const Tolerances& tol = {});

/// Tr(a sigma). Throws if the imaginary residue exceeds 1e-12 (relative).
double hs_inner(const HermitianObservable& a, const DensityOperator& sigma);
double hs_inner(const HermitianObservable& a, const Matrix& sigma);

/// <psi|rho|psi> for a unit vector psi, clamped to [0, 1].
double fidelity_pure(const DensityOperator& rho, const Vector& psi);

/// Frobenius (Hilbert-Schmidt) distance.
double hs_distance(const DensityOperator& a, const DensityOperator& b);
double hs_distance(const Matrix& a, const Matrix& b);

KrausChannel unitary_channel(const Matrix& u);
KrausChannel identity_channel(std::size_t dim);

/// Tr_out as a channel from H_keep (x) H_out to H_keep, Kraus {I (x) <a|}.
KrausChannel partial_trace_channel(std::size_t dim_keep, std::size_t dim_out);

/// Largest Frobenius difference between the two maps on all matrix units.
/// Equality on matrix units is equality of the maps, by linearity.
double max_action_difference(const KrausChannel& a, const KrausChannel& b);

}  // namespace qmdp
