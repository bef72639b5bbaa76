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
#include "qmdp/solver.hpp"

using namespace qmdp;

TEST_CASE("embed distribution") {
  const DensityOperator u = embed_distribution(Distribution::uniform(2));
  CHECK(hs_distance(u, DensityOperator::maximally_mixed(2)) == 0.0);
  CHECK(hs_distance(embed_distribution(Distribution::point_mass(3, 1)),
                    DensityOperator::basis_state(3, 1)) == 0.0);
  Rng rng = make_stream(31, 0);
  const DensityOperator d = embed_distribution(random_distribution(5, rng));
  CHECK(validate_density(d.matrix()).ok);
  CHECK(max_off_diagonal(d.matrix()) == 0.0);
}

TEST_CASE("embed transition channel") {
  // Permutation dynamics: y = (x + a) mod 3.
  FiniteMDP::Transitions p(3, std::vector<std::vector<double>>(2, std::vector<double>(3, 0.0)));
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t a = 0; a < 2; ++a) p[x][a][(x + a) % 3] = 1.0;
  const FiniteMDP perm(p, {{0, 0}, {0, 0}, {0, 0}}, 0.9);
  const KrausChannel ch = embed_transition_channel(perm);
  CHECK(ch.kraus().size() == 6);
  for (const Matrix& k : ch.kraus()) {
    CHECK(k.cwiseAbs().sum() == doctest::Approx(1.0));
    CHECK(k.cwiseAbs().maxCoeff() == 1.0);
  }

  Rng rng = make_stream(32, 0);
  const FiniteMDP mdp = random_finite_mdp(3, 2, 0.9, rng);
  const KrausChannel n = embed_transition_channel(mdp);
  const Distribution nu = random_distribution(6, rng);
  const Matrix out = n.apply(embed_distribution(nu).matrix());
  const Matrix expected = embed_distribution(dmdp_transition(mdp, nu)).matrix();
  CHECK((out - expected).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(validate_channel(n).completeness_residual <= 1e-12);
}

TEST_CASE("embed classical policy") {
  const std::size_t f[] = {1, 0, 1};
  const KrausChannel det = embed_classical_policy(StochasticKernel::deterministic(f, 2));
  for (std::size_t x = 0; x < 3; ++x)
    CHECK(hs_distance(apply_channel(det, DensityOperator::basis_state(3, x)),
                      DensityOperator::basis_state(6, x * 2 + f[x])) == 0.0);

  Rng rng = make_stream(33, 0);
  const StochasticKernel pi = random_kernel(3, 2, rng);
  const KrausChannel gamma = embed_classical_policy(pi);
  const Distribution mu = random_distribution(3, rng);
  CHECK(hs_distance(apply_channel(gamma, embed_distribution(mu)),
                    embed_distribution(lift_policy(pi, mu))) < 1e-15);
  for (std::size_t x = 0; x < 3; ++x) {
    const DensityOperator back = partial_trace(apply_channel(gamma, DensityOperator::basis_state(3, x)), 3, 2);
    CHECK(hs_distance(back, DensityOperator::basis_state(3, x)) < 1e-15);
  }
  CHECK(validate_channel(gamma).ok());
}

TEST_CASE("embed cost") {
  Rng rng = make_stream(34, 0);
  const FiniteMDP mdp = random_finite_mdp(3, 2, 0.9, rng);
  const FiniteMDP unit(mdp.transitions(), {{1, 1}, {1, 1}, {1, 1}}, 0.9);
  CHECK((embed_cost(unit).matrix() - Matrix::Identity(6, 6)).norm() == 0.0);
  CHECK(hs_inner(embed_cost(unit), random_density(6, rng)) == doctest::Approx(1.0));

  const Distribution nu = random_distribution(6, rng);
  CHECK(hs_inner(embed_cost(mdp), embed_distribution(nu)) ==
        doctest::Approx(dmdp_cost(mdp, nu)).epsilon(1e-14));

  const HermitianObservable sp = state_prep_cost(random_pure_vector(2, rng), 3);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sp.matrix());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    CHECK(std::min(std::abs(l), std::abs(l - 1.0)) < 1e-12);
  }
  CHECK(hermitian_residual(sp.matrix()) == 0.0);
}

TEST_CASE("verify equivalence") {
  Rng rng = make_stream(35, 0);
  const FiniteMDP mdp = random_finite_mdp(3, 2, 0.9, rng);
  const StochasticKernel pi = random_kernel(3, 2, rng);
  const Distribution mu0 = random_distribution(3, rng);

  const EquivalenceReport one = verify_equivalence(mdp, pi, mu0, 1);
  CHECK(one.max_cost_discrepancy <= 1e-12);
  CHECK(one.classical_cost == doctest::Approx(dmdp_cost(mdp, lift_policy(pi, mu0))));

  const EquivalenceReport fifty = verify_equivalence(mdp, pi, mu0, 50);
  CHECK(fifty.max_cost_discrepancy <= 1e-9);
  CHECK(fifty.max_state_discrepancy <= 1e-9);
  CHECK(fifty.quantum_cost == doctest::Approx(fifty.classical_cost).epsilon(1e-12));

  // Deterministic dynamics and policy keep basis states exactly.
  FiniteMDP::Transitions p(3, std::vector<std::vector<double>>(2, std::vector<double>(3, 0.0)));
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t a = 0; a < 2; ++a) p[x][a][(2 * x + a) % 3] = 1.0;
  const FiniteMDP det(p, mdp.costs(), 0.9);
  const std::size_t f[] = {0, 1, 1};
  const StochasticKernel dpi = StochasticKernel::deterministic(f, 2);
  const EmbeddedModel model = embed_model(det);
  const RolloutResult r =
      rollout(MarkovQuantumPolicy::stationary(embed_classical_policy(dpi)), model.transition,
              model.cost, DensityOperator::basis_state(3, 0), 0.9, 20);
  for (const DensityOperator& s : r.states) {
    const Matrix& m = s.matrix();
    CHECK(max_off_diagonal(m) == 0.0);
    CHECK(m.diagonal().real().maxCoeff() == 1.0);
  }
  CHECK(verify_equivalence(det, dpi, Distribution::point_mass(3, 0), 20).max_state_discrepancy == 0.0);
}

TEST_CASE("property: intertwining of the embedding") {
  Rng rng = make_stream(36, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const FiniteMDP mdp = random_finite_mdp(4, 3, 0.9, rng);
    const KrausChannel n = embed_transition_channel(mdp);
    const Distribution nu = random_distribution(12, rng);
    const Matrix lhs = embed_distribution(dmdp_transition(mdp, nu)).matrix();
    const Matrix rhs = n.apply(embed_distribution(nu).matrix());
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}
