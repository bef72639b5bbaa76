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


#include "qmdp/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qmdp/embedding.hpp"

namespace qmdp {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::size_t action_dim(const KrausChannel& gamma) {
  if (gamma.out_dim() % gamma.in_dim() != 0)
    throw std::invalid_argument("policy channel output is not H_X (x) H_A");
  return gamma.out_dim() / gamma.in_dim();
}

}  // namespace

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::classical: return "classical";
    case PolicyKind::open_loop: return "open_loop";
    case PolicyKind::closed_loop: return "closed_loop";
    case PolicyKind::general: break;
  }
  return "general";
}

PolicyKind policy_kind_from_string(const std::string& name) {
  if (name == "classical") return PolicyKind::classical;
  if (name == "open_loop") return PolicyKind::open_loop;
  if (name == "closed_loop") return PolicyKind::closed_loop;
  if (name == "general") return PolicyKind::general;
  throw std::invalid_argument("unknown policy kind: " + name);
}

MarkovQuantumPolicy::MarkovQuantumPolicy(std::vector<KrausChannel> channels, KrausChannel tail,
                                         PolicyKind kind)
    : channels_(std::move(channels)), tail_(std::move(tail)), kind_(kind) {
  action_dim(tail_);
  for (const auto& ch : channels_)
    if (ch.in_dim() != tail_.in_dim() || ch.out_dim() != tail_.out_dim())
      throw std::invalid_argument("policy channels have inconsistent dimensions");
}

MarkovQuantumPolicy MarkovQuantumPolicy::stationary(KrausChannel channel, PolicyKind kind) {
  return MarkovQuantumPolicy({}, std::move(channel), kind);
}

const KrausChannel& MarkovQuantumPolicy::at(std::size_t t) const {
  return t < channels_.size() ? channels_[t] : tail_;
}

PhiFamily::PhiFamily(std::size_t dim_x, std::size_t dim_a, Matrix vectors)
    : dim_x_(dim_x), dim_a_(dim_a), v_(std::move(vectors)) {
  if (dim_x_ == 0 || dim_a_ == 0) throw std::invalid_argument("phi family dimensions must be positive");
  if (v_.rows() != idx(dim_x_ * dim_a_) || v_.cols() == 0)
    throw std::invalid_argument("phi family needs one vector per (x, a)");
  if (dim_l() > dim_x_ * dim_x_ * dim_a_)
    throw std::invalid_argument("phi family ancilla dimension exceeds |X|^2 |A|");
  for (std::size_t x = 0; x < dim_x_; ++x) {
    const double norm2 = v_.middleRows(idx(x * dim_a_), idx(dim_a_)).squaredNorm();
    if (std::abs(norm2 - 1.0) > 1e-9)
      throw std::invalid_argument("phi family is not normalized for state " + std::to_string(x));
  }
}

Vector PhiFamily::phi(std::size_t x, std::size_t a) const {
  return v_.row(idx(x * dim_a_ + a)).transpose();
}

PhiFamily random_phi_family(std::size_t dim_x, std::size_t dim_a, std::size_t dim_l, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix v(idx(dim_x * dim_a), idx(dim_l));
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index l = 0; l < v.cols(); ++l) {
      const double re = normal(rng);
      const double im = normal(rng);
      v(i, l) = Complex(re, im);
    }
  for (std::size_t x = 0; x < dim_x; ++x) {
    auto block = v.middleRows(idx(x * dim_a), idx(dim_a));
    block /= block.norm();
  }
  return PhiFamily(dim_x, dim_a, std::move(v));
}

PhiFamily orthonormal_phi_family(const StochasticKernel& pi) {
  const std::size_t nx = pi.n_states();
  const std::size_t na = pi.n_actions();
  Matrix v = Matrix::Zero(idx(nx * na), idx(nx * na));
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t a = 0; a < na; ++a)
      v(idx(x * na + a), idx(x * na + a)) = std::sqrt(pi.prob(a, x));
  return PhiFamily(nx, na, std::move(v));
}

PhiFamily constant_phi_family(std::size_t dim_x, std::size_t dim_a, const Vector& v) {
  if (std::abs(v.norm() - 1.0) > 1e-9) throw std::invalid_argument("v must be a unit vector");
  Matrix rows(idx(dim_x * dim_a), v.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim_a));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) rows.row(i) = scale * v.transpose();
  return PhiFamily(dim_x, dim_a, std::move(rows));
}

std::vector<DensityOperator> classical_basis_set(std::size_t dim_x) {
  std::vector<DensityOperator> s;
  s.reserve(dim_x);
  for (std::size_t x = 0; x < dim_x; ++x) s.push_back(DensityOperator::basis_state(dim_x, x));
  return s;
}

KrausChannel open_loop_channel(const DensityOperator& xi, std::size_t dim_x) {
  if (dim_x == 0) throw std::invalid_argument("dim_x must be positive");
  Eigen::SelfAdjointEigenSolver<Matrix> es(xi.matrix());
  const Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(0.0);
  const double total = lambda.sum();
  const Matrix id = Matrix::Identity(idx(dim_x), idx(dim_x));
  std::vector<Matrix> kraus;
  for (Eigen::Index k = lambda.size() - 1; k >= 0; --k) {
    if (lambda(k) <= 0.0) continue;
    const Matrix column = std::sqrt(lambda(k) / total) * es.eigenvectors().col(k);
    kraus.push_back(tensor_product(id, column));
  }
  return KrausChannel(dim_x, dim_x * xi.dim(), std::move(kraus));
}

KrausChannel closed_loop_channel(const PhiFamily& phi) {
  const std::size_t nx = phi.dim_x();
  const std::size_t na = phi.dim_a();
  std::vector<Matrix> kraus;
  kraus.reserve(phi.dim_l());
  for (std::size_t l = 0; l < phi.dim_l(); ++l) {
    Matrix k = Matrix::Zero(idx(nx * na), idx(nx));
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t a = 0; a < na; ++a)
        k(idx(x * na + a), idx(x)) = phi.vectors()(idx(x * na + a), idx(l));
    kraus.push_back(std::move(k));
  }
  return KrausChannel(nx, nx * na, std::move(kraus));
}

ReversibilityReport check_full_reversibility(const KrausChannel& gamma, double tol) {
  const std::size_t nx = gamma.in_dim();
  const std::size_t na = action_dim(gamma);
  ReversibilityReport r;
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < nx; ++j) {
      const Matrix e = matrix_unit(nx, i, j);
      const Matrix back = partial_trace(gamma.apply(e), nx, na, TraceSide::trace_second);
      r.residual = std::max(r.residual, (back - e).norm());
    }
  r.passed = r.residual <= tol;
  return r;
}

ReversibilityReport check_classical_reversibility(const KrausChannel& gamma, double tol) {
  const std::size_t nx = gamma.in_dim();
  const std::size_t na = action_dim(gamma);
  ReversibilityReport r;
  for (std::size_t x = 0; x < nx; ++x) {
    const Matrix e = matrix_unit(nx, x, x);
    const Matrix back = partial_trace(gamma.apply(e), nx, na, TraceSide::trace_second);
    r.residual = std::max(r.residual, (back - e).norm());
  }
  r.passed = r.residual <= tol;
  return r;
}

std::optional<StochasticKernel> extract_classical_kernel(const KrausChannel& gamma,
                                                         std::size_t dim_a) {
  const std::size_t nx = gamma.in_dim();
  if (gamma.out_dim() != nx * dim_a) return std::nullopt;
  std::vector<std::vector<double>> rows(nx, std::vector<double>(dim_a));
  for (std::size_t x = 0; x < nx; ++x) {
    const Matrix out = gamma.apply(matrix_unit(nx, x, x));
    double sum = 0.0;
    for (std::size_t a = 0; a < dim_a; ++a) {
      const double w = out(idx(x * dim_a + a), idx(x * dim_a + a)).real();
      if (w < -1e-9) return std::nullopt;
      rows[x][a] = std::max(0.0, w);
      sum += rows[x][a];
    }
    if (std::abs(sum - 1.0) > 1e-9) return std::nullopt;
    for (auto& w : rows[x]) w /= sum;
  }
  return StochasticKernel(std::move(rows));
}

Matrix appended_factor(const KrausChannel& gamma, std::size_t dim_a) {
  const std::size_t nx = gamma.in_dim();
  const Matrix mixed = Matrix::Identity(idx(nx), idx(nx)) / static_cast<double>(nx);
  return partial_trace(gamma.apply(mixed), dim_a, nx, TraceSide::trace_first);
}

PolicyKind classify_policy(const KrausChannel& gamma, double tol) {
  if (gamma.out_dim() % gamma.in_dim() != 0) return PolicyKind::general;
  const std::size_t nx = gamma.in_dim();
  const std::size_t na = gamma.out_dim() / nx;

  if (const auto pi = extract_classical_kernel(gamma, na)) {
    if (max_action_difference(gamma, embed_classical_policy(*pi)) <= tol)
      return PolicyKind::classical;
  }

  const Matrix xi = appended_factor(gamma, na);
  double open_loop_residual = 0.0;
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < nx; ++j) {
      const Matrix e = matrix_unit(nx, i, j);
      open_loop_residual =
          std::max(open_loop_residual, (gamma.apply(e) - tensor_product(e, xi)).norm());
    }
  if (open_loop_residual <= tol) return PolicyKind::open_loop;

  if (check_classical_reversibility(gamma, tol).passed) return PolicyKind::closed_loop;
  return PolicyKind::general;
}

}  // namespace qmdp
