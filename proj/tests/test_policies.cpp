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


#include <doctest.h>

#include <cmath>

#include "qmdp/embedding.hpp"
#include "qmdp/policies.hpp"

using namespace qmdp;

namespace {

double max_state_difference(const KrausChannel& a, const KrausChannel& b, Rng& rng, int samples) {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const DensityOperator rho = random_density(a.in_dim(), rng);
    worst = std::max(worst, hs_distance(a.apply(rho.matrix()), b.apply(rho.matrix())));
  }
  return worst;
}

}  // namespace

TEST_CASE("markov quantum policy indexing") {
  const KrausChannel c0 = open_loop_channel(DensityOperator::basis_state(2, 0), 2);
  const KrausChannel c1 = open_loop_channel(DensityOperator::basis_state(2, 1), 2);
  const MarkovQuantumPolicy pol({c0}, c1, PolicyKind::open_loop);
  CHECK(&pol.at(0) == &pol.prefix()[0]);
  CHECK(&pol.at(5) == &pol.tail());
  CHECK(pol.dim_x() == 2);
  CHECK(pol.dim_a() == 2);
  CHECK(policy_kind_from_string(to_string(PolicyKind::closed_loop)) == PolicyKind::closed_loop);
}

TEST_CASE("phi family validation") {
  Matrix bad = Matrix::Zero(4, 2);
  bad(0, 0) = 1.0;
  bad(2, 0) = 0.5;
  CHECK_THROWS_AS(PhiFamily(2, 2, bad), std::invalid_argument);
  CHECK_THROWS_AS(PhiFamily(2, 2, Matrix::Zero(4, 9)), std::invalid_argument);
}

TEST_CASE("open loop channel") {
  const KrausChannel fixed = open_loop_channel(DensityOperator::basis_state(3, 1), 2);
  REQUIRE(fixed.kraus().size() == 1);
  Vector e1 = Vector::Zero(3);
  e1(1) = 1.0;
  CHECK((fixed.kraus()[0] - tensor_product(Matrix::Identity(2, 2), e1)).norm() < 1e-15);

  Rng rng = make_stream(41, 0);
  const DensityOperator xi = random_density(3, rng);
  const KrausChannel gamma = open_loop_channel(xi, 2);
  for (int k = 0; k < 5; ++k) {
    const DensityOperator rho = random_density(2, rng);
    CHECK(hs_distance(partial_trace(apply_channel(gamma, rho), 2, 3), rho) < 1e-12);
    CHECK(hs_distance(apply_channel(gamma, rho).matrix(),
                      tensor_product(rho.matrix(), xi.matrix())) < 1e-12);
  }

  Rng rng2 = make_stream(42, 0);
  const FiniteMDP mdp = random_finite_mdp(2, 3, 0.9, rng2);
  const KrausChannel uniform = open_loop_channel(DensityOperator::maximally_mixed(3), 2);
  const double cost = hs_inner(embed_cost(mdp), apply_channel(uniform, DensityOperator::basis_state(2, 0)));
  CHECK(cost == doctest::Approx((mdp.c(0, 0) + mdp.c(0, 1) + mdp.c(0, 2)) / 3.0));
}

TEST_CASE("closed loop channel") {
  Rng rng = make_stream(43, 0);
  const StochasticKernel pi = random_kernel(3, 2, rng);
  const KrausChannel ortho = closed_loop_channel(orthonormal_phi_family(pi));
  CHECK(max_action_difference(ortho, embed_classical_policy(pi)) <= 1e-10);

  const Vector v = random_pure_vector(4, rng);
  const KrausChannel constant = closed_loop_channel(constant_phi_family(3, 2, v));
  const Matrix plus = Matrix::Constant(2, 2, Complex(0.5, 0.0));
  CHECK(max_action_difference(constant, open_loop_channel(DensityOperator(plus), 3)) <= 1e-10);

  for (int k = 0; k < 10; ++k) {
    const KrausChannel gamma = closed_loop_channel(random_phi_family(3, 2, 6, rng));
    CHECK(validate_channel(gamma).ok());
    for (std::size_t x = 0; x < 3; ++x) {
      const DensityOperator back =
          partial_trace(apply_channel(gamma, DensityOperator::basis_state(3, x)), 3, 2);
      CHECK(hs_distance(back, DensityOperator::basis_state(3, x)) <= 1e-10);
    }
  }
}

TEST_CASE("full reversibility") {
  Rng rng = make_stream(44, 0);
  CHECK(check_full_reversibility(open_loop_channel(random_density(2, rng), 3)).passed);
  const ReversibilityReport zero = check_full_reversibility(open_loop_channel(DensityOperator::basis_state(2, 0), 2));
  CHECK(zero.passed);
  CHECK(zero.residual < 1e-15);

  const StochasticKernel pi({{0.5, 0.5}, {0.3, 0.7}});
  const ReversibilityReport r = check_full_reversibility(embed_classical_policy(pi));
  CHECK_FALSE(r.passed);
  CHECK(r.residual > 0.1);
}

TEST_CASE("classical reversibility") {
  Rng rng = make_stream(45, 0);
  CHECK(check_classical_reversibility(embed_classical_policy(random_kernel(3, 2, rng))).passed);
  CHECK(check_classical_reversibility(open_loop_channel(random_density(2, rng), 3)).passed);

  // Sends |0><0| to |1><1| (x) xi: flip then append.
  Matrix flip = Matrix::Zero(2, 2);
  flip(0, 1) = flip(1, 0) = 1.0;
  const KrausChannel swap_like =
      compose(open_loop_channel(DensityOperator::maximally_mixed(2), 2), unitary_channel(flip));
  CHECK_FALSE(check_classical_reversibility(swap_like).passed);
}

TEST_CASE("classify policy") {
  Rng rng = make_stream(46, 0);
  const StochasticKernel pi = random_kernel(3, 2, rng);
  const KrausChannel gamma = embed_classical_policy(pi);
  CHECK(classify_policy(gamma) == PolicyKind::classical);
  const auto extracted = extract_classical_kernel(gamma, 2);
  REQUIRE(extracted.has_value());
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t a = 0; a < 2; ++a) CHECK(extracted->prob(a, x) == doctest::Approx(pi.prob(a, x)));

  const DensityOperator xi = random_density(2, rng);
  const KrausChannel appending = open_loop_channel(xi, 3);
  CHECK(classify_policy(appending) == PolicyKind::open_loop);
  CHECK(hs_distance(appended_factor(appending, 2), xi.matrix()) < 1e-12);

  CHECK(classify_policy(closed_loop_channel(random_phi_family(3, 2, 6, rng))) == PolicyKind::closed_loop);

  Matrix flip = Matrix::Zero(2, 2);
  flip(0, 1) = flip(1, 0) = 1.0;
  CHECK(classify_policy(compose(open_loop_channel(xi, 2), unitary_channel(flip))) ==
        PolicyKind::general);
}

TEST_CASE("property: hierarchy containment") {
  Rng rng = make_stream(47, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const KrausChannel appending = open_loop_channel(random_density(3, rng), 2);
    if (check_full_reversibility(appending).passed)
      CHECK(check_classical_reversibility(appending).passed);
    CHECK(check_classical_reversibility(embed_classical_policy(random_kernel(2, 3, rng))).passed);
    const KrausChannel closed = closed_loop_channel(random_phi_family(2, 3, 5, rng));
    CHECK(check_classical_reversibility(closed).passed);
    const StochasticKernel pi = random_kernel(2, 3, rng);
    CHECK(max_state_difference(closed_loop_channel(orthonormal_phi_family(pi)),
                               embed_classical_policy(pi), rng, 5) <= 1e-10);
  }
}
