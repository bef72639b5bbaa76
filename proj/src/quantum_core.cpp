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

#include "qmdp/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qmdp {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

void Tolerances::check() const {
  require(hermitian_tol >= 0 && trace_tol >= 0 && psd_tol >= 0 && tp_tol >= 0,
          "tolerances must be nonnegative");
}

Matrix tensor_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix matrix_unit(std::size_t dim, std::size_t i, std::size_t j) {
  Matrix m = Matrix::Zero(idx(dim), idx(dim));
  m(idx(i), idx(j)) = 1.0;
  return m;
}

double hermitian_residual(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double min_hermitian_eigenvalue(const Matrix& m) {
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_off_diagonal(const Matrix& m) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j) worst = std::max(worst, std::abs(m(i, j)));
  return worst;
}

Matrix partial_trace(const Matrix& m, std::size_t dim_keep, std::size_t dim_out,
                     TraceSide side) {
  const auto n = idx(dim_keep * dim_out);
  require(m.rows() == n && m.cols() == n, "partial_trace: dimension mismatch");
  const auto k = idx(dim_keep);
  const auto o = idx(dim_out);
  Matrix out = Matrix::Zero(k, k);
  if (side == TraceSide::trace_second) {
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) {
        Complex s = 0.0;
        for (Eigen::Index a = 0; a < o; ++a) s += m(i * o + a, j * o + a);
        out(i, j) = s;
      }
  } else {
    for (Eigen::Index a = 0; a < o; ++a) out += m.block(a * k, a * k, k, k);
  }
  return out;
}

// ---------------------------------------------------------------------------

DensityOperator::DensityOperator(Matrix m, const Tolerances& tol) : m_(std::move(m)) {
  tol.check();
  require(m_.rows() > 0 && m_.rows() == m_.cols(), "density operator must be square");
  require(hermitian_residual(m_) <= tol.hermitian_tol, "density operator is not Hermitian");
  require(std::abs(m_.trace() - Complex(1.0)) <= tol.trace_tol,
          "density operator does not have unit trace");
  require(min_hermitian_eigenvalue(m_) >= -tol.psd_tol,
          "density operator is not positive semi-definite");
}

DensityOperator DensityOperator::pure(const Vector& psi) {
  require(psi.size() > 0, "empty state vector");
  require(std::abs(psi.norm() - 1.0) <= 1e-9, "state vector is not normalized");
  Matrix m = psi * psi.adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityOperator(std::move(m), Trusted{});
}

DensityOperator DensityOperator::basis_state(std::size_t dim, std::size_t index) {
  require(index < dim, "basis index out of range");
  return DensityOperator(matrix_unit(dim, index, index), Trusted{});
}

DensityOperator DensityOperator::maximally_mixed(std::size_t dim) {
  require(dim > 0, "dimension must be positive");
  return DensityOperator(Matrix::Identity(idx(dim), idx(dim)) / static_cast<double>(dim),
                         Trusted{});
}

DensityOperator DensityOperator::diagonal(std::span<const double> weights) {
  Matrix m = Matrix::Zero(idx(weights.size()), idx(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i) m(idx(i), idx(i)) = weights[i];
  return DensityOperator(std::move(m));
}

DensityOperator DensityOperator::from_channel_output(Matrix m) {
  require(m.rows() > 0 && m.rows() == m.cols(), "density operator must be square");
  Matrix h = 0.5 * (m + m.adjoint());
  const double tr = h.trace().real();
  if (std::abs(tr - 1.0) > 1e-6)
    throw std::runtime_error("channel output trace drifted by " + std::to_string(tr - 1.0));
  h /= tr;
  return DensityOperator(std::move(h), Trusted{});
}

HermitianObservable::HermitianObservable(Matrix m, const Tolerances& tol) : m_(std::move(m)) {
  tol.check();
  require(m_.rows() > 0 && m_.rows() == m_.cols(), "observable must be square");
  require(hermitian_residual(m_) <= tol.hermitian_tol, "observable is not Hermitian");
}

HermitianObservable HermitianObservable::identity(std::size_t dim) {
  return HermitianObservable(Matrix::Identity(idx(dim), idx(dim)));
}

KrausChannel::KrausChannel(std::size_t in_dim, std::size_t out_dim, std::vector<Matrix> kraus)
    : in_dim_(in_dim), out_dim_(out_dim), kraus_(std::move(kraus)) {
  require(in_dim_ > 0 && out_dim_ > 0, "channel dimensions must be positive");
  require(!kraus_.empty(), "channel needs at least one Kraus operator");
  for (const auto& k : kraus_)
    require(k.rows() == idx(out_dim_) && k.cols() == idx(in_dim_),
            "Kraus operator has the wrong shape");
}

Matrix KrausChannel::apply(const Matrix& m) const {
  require(m.rows() == idx(in_dim_) && m.cols() == idx(in_dim_),
          "apply_channel: dimension mismatch");
  Matrix out = Matrix::Zero(idx(out_dim_), idx(out_dim_));
  for (const auto& k : kraus_) out.noalias() += k * m * k.adjoint();
  return out;
}

Matrix KrausChannel::adjoint_apply(const Matrix& m) const {
  require(m.rows() == idx(out_dim_) && m.cols() == idx(out_dim_),
          "adjoint_apply: dimension mismatch");
  Matrix out = Matrix::Zero(idx(in_dim_), idx(in_dim_));
  for (const auto& k : kraus_) out.noalias() += k.adjoint() * m * k;
  return out;
}

// ---------------------------------------------------------------------------

DensityOperator apply_channel(const KrausChannel& ch, const DensityOperator& rho) {
  return DensityOperator::from_channel_output(ch.apply(rho.matrix()));
}

KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner) {
  require(inner.out_dim() == outer.in_dim(), "compose: dimension mismatch");
  std::vector<Matrix> kraus;
  kraus.reserve(outer.kraus().size() * inner.kraus().size());
  for (const auto& ko : outer.kraus())
    for (const auto& ki : inner.kraus()) kraus.push_back(ko * ki);
  return KrausChannel(inner.in_dim(), outer.out_dim(), std::move(kraus));
}

DensityOperator partial_trace(const DensityOperator& sigma, std::size_t dim_keep,
                              std::size_t dim_out, TraceSide side) {
  return DensityOperator::from_channel_output(
      partial_trace(sigma.matrix(), dim_keep, dim_out, side));
}

Matrix choi_matrix(const LinearMap& map, std::size_t in_dim, std::size_t out_dim) {
  const auto n = idx(in_dim);
  const auto o = idx(out_dim);
  Matrix choi = Matrix::Zero(n * o, n * o);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Matrix image = map(matrix_unit(in_dim, static_cast<std::size_t>(i),
                                           static_cast<std::size_t>(j)));
      require(image.rows() == o && image.cols() == o, "choi_matrix: map output shape");
      choi.block(i * o, j * o, o, o) = image;
    }
  return choi;
}

Matrix choi_matrix(const KrausChannel& ch) {
  return choi_matrix([&ch](const Matrix& m) { return ch.apply(m); }, ch.in_dim(),
                     ch.out_dim());
}

ValidationReport validate_channel(const KrausChannel& ch, const Tolerances& tol) {
  tol.check();
  Matrix sum = Matrix::Zero(idx(ch.in_dim()), idx(ch.in_dim()));
  for (const auto& k : ch.kraus()) sum.noalias() += k.adjoint() * k;
  ValidationReport r;
  r.completeness_residual = (sum - Matrix::Identity(sum.rows(), sum.cols())).norm();
  r.choi_min_eigenvalue = min_hermitian_eigenvalue(choi_matrix(ch));
  r.trace_preserving = r.completeness_residual <= tol.tp_tol;
  r.completely_positive = r.choi_min_eigenvalue >= -tol.psd_tol;
  return r;
}

ValidationReport validate_linear_map(const LinearMap& map, std::size_t in_dim,
                                     std::size_t out_dim, const Tolerances& tol) {
  tol.check();
  const Matrix choi = choi_matrix(map, in_dim, out_dim);
  const Matrix marginal = partial_trace(choi, in_dim, out_dim, TraceSide::trace_second);
  ValidationReport r;
  r.completeness_residual =
      (marginal - Matrix::Identity(idx(in_dim), idx(in_dim))).norm();
  r.choi_min_eigenvalue = min_hermitian_eigenvalue(choi);
  r.trace_preserving = r.completeness_residual <= tol.tp_tol;
  r.completely_positive = r.choi_min_eigenvalue >= -tol.psd_tol &&
                          hermitian_residual(choi) <= tol.hermitian_tol;
  return r;
}

DensityReport validate_density(const Matrix& m, const Tolerances& tol) {
  tol.check();
  DensityReport r;
  if (m.rows() == 0 || m.rows() != m.cols()) return r;
  r.hermitian_residual = hermitian_residual(m);
  r.trace_error = std::abs(m.trace() - Complex(1.0));
  r.min_eigenvalue = min_hermitian_eigenvalue(m);
  r.ok = r.hermitian_residual <= tol.hermitian_tol && r.trace_error <= tol.trace_tol &&
         r.min_eigenvalue >= -tol.psd_tol;
  return r;
}

double hs_inner(const HermitianObservable& a, const Matrix& sigma) {
  require(a.matrix().rows() == sigma.rows() && sigma.rows() == sigma.cols(),
          "hs_inner: dimension mismatch");
  // Tr(A S) = sum_ij A_ij S_ji
  const Complex value = a.matrix().cwiseProduct(sigma.transpose()).sum();
  const double scale = std::max(1.0, a.matrix().norm() * sigma.norm());
  if (std::abs(value.imag()) > 1e-12 * scale)
    throw std::invalid_argument("hs_inner: imaginary residue indicates a non-Hermitian input");
  return value.real();
}

double hs_inner(const HermitianObservable& a, const DensityOperator& sigma) {
  return hs_inner(a, sigma.matrix());
}

double fidelity_pure(const DensityOperator& rho, const Vector& psi) {
  require(psi.size() == idx(rho.dim()), "fidelity_pure: dimension mismatch");
  require(std::abs(psi.norm() - 1.0) <= 1e-9, "fidelity_pure: target is not a unit vector");
  const double f = psi.dot(rho.matrix() * psi).real();
  if (f > 1.0 + 1e-9 || f < -1e-9)
    throw std::runtime_error("fidelity_pure: overlap outside [0, 1]");
  return std::clamp(f, 0.0, 1.0);
}

double hs_distance(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "hs_distance: dimension mismatch");
  return (a - b).norm();
}

double hs_distance(const DensityOperator& a, const DensityOperator& b) {
  return hs_distance(a.matrix(), b.matrix());
}

KrausChannel unitary_channel(const Matrix& u) {
  require(u.rows() > 0 && u.rows() == u.cols(), "unitary must be square");
  const double err = (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm();
  require(err <= 1e-9, "matrix is not unitary");
  const auto d = static_cast<std::size_t>(u.rows());
  return KrausChannel(d, d, {u});
}

KrausChannel identity_channel(std::size_t dim) {
  return KrausChannel(dim, dim, {Matrix::Identity(idx(dim), idx(dim))});
}

KrausChannel partial_trace_channel(std::size_t dim_keep, std::size_t dim_out) {
  std::vector<Matrix> kraus;
  const Matrix id = Matrix::Identity(idx(dim_keep), idx(dim_keep));
  for (std::size_t a = 0; a < dim_out; ++a) {
    Matrix bra = Matrix::Zero(1, idx(dim_out));
    bra(0, idx(a)) = 1.0;
    kraus.push_back(tensor_product(id, bra));
  }
  return KrausChannel(dim_keep * dim_out, dim_keep, std::move(kraus));
}

double max_action_difference(const KrausChannel& a, const KrausChannel& b) {
  require(a.in_dim() == b.in_dim() && a.out_dim() == b.out_dim(),
          "max_action_difference: dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.in_dim(); ++i)
    for (std::size_t j = 0; j < a.in_dim(); ++j) {
      const Matrix e = matrix_unit(a.in_dim(), i, j);
      worst = std::max(worst, (a.apply(e) - b.apply(e)).norm());
    }
  return worst;
}

}  // namespace qmdp
