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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qmdp/classical_mdp.hpp"
#include "qmdp/quantum_core.hpp"
#include "qmdp/random.hpp"

namespace qmdp {

enum class PolicyKind { general, classical, open_loop, closed_loop };

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

/// Time-indexed sequence of channels H_X -> H_X (x) H_A. Step t uses
/// channels[t] while t < channels.size() and the stationary tail afterwards.
class MarkovQuantumPolicy {
 public:
  MarkovQuantumPolicy(std::vector<KrausChannel> channels, KrausChannel tail,
                      PolicyKind kind = PolicyKind::general);

  static MarkovQuantumPolicy stationary(KrausChannel channel,
                                        PolicyKind kind = PolicyKind::general);

  const KrausChannel& at(std::size_t t) const;
  bool is_stationary() const { return channels_.empty(); }
  const std::vector<KrausChannel>& prefix() const { return channels_; }
  const KrausChannel& tail() const { return tail_; }
  PolicyKind kind() const { return kind_; }
  std::size_t dim_x() const { return tail_.in_dim(); }
  std::size_t dim_a() const { return tail_.out_dim() / tail_.in_dim(); }

 private:
  std::vector<KrausChannel> channels_;
  KrausChannel tail_;
  PolicyKind kind_;
};

/// Vectors |phi_{x,a}> in H_L with sum_a <phi_{x,a}, phi_{x,a}> = 1 for every x.
/// Row x * dim_a + a of `vectors` holds the coordinates of |phi_{x,a}>.
class PhiFamily {
 public:
  PhiFamily(std::size_t dim_x, std::size_t dim_a, Matrix vectors);

  std::size_t dim_x() const { return dim_x_; }
  std::size_t dim_a() const { return dim_a_; }
  std::size_t dim_l() const { return static_cast<std::size_t>(v_.cols()); }
  const Matrix& vectors() const { return v_; }
  Vector phi(std::size_t x, std::size_t a) const;

 private:
  std::size_t dim_x_;
  std::size_t dim_a_;
  Matrix v_;
};

/// Complex Gaussian vectors, normalized per state.
PhiFamily random_phi_family(std::size_t dim_x, std::size_t dim_a, std::size_t dim_l, Rng& rng);

/// phi_{x,a} = sqrt(pi(a|x)) |l_{x,a}> with orthonormal |l_{x,a}>.
PhiFamily orthonormal_phi_family(const StochasticKernel& pi);

/// phi_{x,a} = v / sqrt(|A|) for a fixed unit vector v.
PhiFamily constant_phi_family(std::size_t dim_x, std::size_t dim_a, const Vector& v);

/// {|x><x| : x in X}
std::vector<DensityOperator> classical_basis_set(std::size_t dim_x);

/// rho -> rho (x) xi, with Kraus set {I (x) sqrt(lambda_k) |e_k>} from the
/// spectral decomposition of xi.
KrausChannel open_loop_channel(const DensityOperator& xi, std::size_t dim_x);

/// gamma = Tr_L o N_V for the isometry V|x> = |x> (x) sum_a |a> (x) |phi_{x,a}>.
/// Kraus operators K_l = (I (x) I (x) <l|) V, l = 0 .. dim_l - 1.
KrausChannel closed_loop_channel(const PhiFamily& phi);

struct ReversibilityReport {
  double residual = 0.0;
  bool passed = false;
};

/// Checks Tr_A(gamma(E_ij)) = E_ij on every matrix unit.
ReversibilityReport check_full_reversibility(const KrausChannel& gamma, double tol = 1e-9);

/// Checks Tr_A(gamma(|x><x|)) = |x><x| on the classical basis states only.
ReversibilityReport check_classical_reversibility(const KrausChannel& gamma, double tol = 1e-9);

/// pi(a|x) = <x,a| gamma(|x><x|) |x,a>. Returns nothing if the extracted rows
/// are not probability vectors.
std::optional<StochasticKernel> extract_classical_kernel(const KrausChannel& gamma,
                                                         std::size_t dim_a);

/// Tr_X(gamma(I / dim_x)), the factor an appending channel attaches.
Matrix appended_factor(const KrausChannel& gamma, std::size_t dim_a);

/// Most specific class of the hierarchy, tested in the order classical,
/// open-loop, closed-loop. The action dimension is out_dim / in_dim.
PolicyKind classify_policy(const KrausChannel& gamma, double tol = 1e-9);

}  // namespace qmdp
