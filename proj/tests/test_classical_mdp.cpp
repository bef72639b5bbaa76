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

#include <algorithm>
#include <cmath>
#include <limits>

#include "qmdp/classical_mdp.hpp"
#include "qmdp/embedding.hpp"

using namespace qmdp;

namespace {

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Horizon-T brute force: V_{t}(x) = min_a c + beta sum_y p V_{t+1}(y), V_T = 0.
std::vector<double> backward_induction(const FiniteMDP& mdp, std::size_t horizon) {
  std::vector<double> v(mdp.n_states(), 0.0);
  for (std::size_t t = 0; t < horizon; ++t) {
    std::vector<double> next(mdp.n_states());
    for (std::size_t x = 0; x < mdp.n_states(); ++x) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
        double q = mdp.c(x, a);
        for (std::size_t y = 0; y < mdp.n_states(); ++y) q += mdp.beta() * mdp.p(y, x, a) * v[y];
        best = std::min(best, q);
      }
      next[x] = best;
    }
    v = next;
  }
  return v;
}

FiniteMDP single_state(double cost, double beta) { return FiniteMDP({{{1.0}}}, {{cost}}, beta); }

}  // namespace

TEST_CASE("distribution and kernel validation") {
  CHECK_THROWS_AS(Distribution({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(Distribution({1.2, -0.2}), std::invalid_argument);
  CHECK(Distribution::uniform(4)[2] == 0.25);
  CHECK_THROWS_AS(StochasticKernel({{0.5, 0.4}}), std::invalid_argument);
  const std::size_t f[] = {1, 0};
  const StochasticKernel det = StochasticKernel::deterministic(f, 3);
  CHECK(det.prob(1, 0) == 1.0);
  CHECK(det.prob(0, 1) == 1.0);
  CHECK_THROWS_AS(single_state(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("value iteration") {
  const ClassicalSolution one = value_iteration(single_state(1.0, 0.9), 1e-9);
  CHECK(one.values[0] == doctest::Approx(10.0).epsilon(1e-9));

  Rng rng = make_stream(21, 0);
  const FiniteMDP random = random_finite_mdp(3, 2, 0.9, rng);
  const FiniteMDP zero(random.transitions(), {{0, 0}, {0, 0}, {0, 0}}, 0.9);
  for (double v : value_iteration(zero, 1e-6).values) CHECK(v == 0.0);

  const double eps = 1e-6;
  const ClassicalSolution sol = value_iteration(random, eps);
  const auto horizon = static_cast<std::size_t>(
      std::ceil(std::log(eps * (1 - 0.9) / random.max_abs_cost()) / std::log(0.9)));
  CHECK(sup_diff(sol.values, backward_induction(random, horizon)) <= eps);
  CHECK(sol.residual <= eps * (1 - 0.9) / (2 * 0.9));
}

TEST_CASE("value iteration tie-breaking prefers the lowest action") {
  const FiniteMDP tied({{{1.0}, {1.0}, {1.0}}}, {{0.5, 0.5, 0.5}}, 0.9);
  CHECK(value_iteration(tied, 1e-8).policy[0] == 0);
}

TEST_CASE("evaluate policy") {
  // Deterministic 2-cycle with unit cost.
  const FiniteMDP cycle({{{0.0, 1.0}}, {{1.0, 0.0}}}, {{1.0}, {1.0}}, 0.9);
  CHECK(evaluate_policy(cycle, StochasticKernel::uniform(2, 1), Distribution::point_mass(2, 0)) ==
        doctest::Approx(10.0));

  Rng rng = make_stream(22, 0);
  const FiniteMDP mdp = random_finite_mdp(3, 2, 0.9, rng);
  const double eps = 1e-7;
  const ClassicalSolution sol = value_iteration(mdp, eps);
  const StochasticKernel greedy = StochasticKernel::deterministic(sol.policy, 2);
  const Distribution mu0 = random_distribution(3, rng);
  double optimal = 0.0;
  for (std::size_t x = 0; x < 3; ++x) optimal += mu0[x] * sol.values[x];
  CHECK(std::abs(evaluate_policy(mdp, greedy, mu0) - optimal) <= eps);
  CHECK(evaluate_policy(mdp, StochasticKernel::uniform(3, 2), mu0) >= optimal - eps);
}

TEST_CASE("dmdp transition and cost") {
  Rng rng = make_stream(23, 0);
  const FiniteMDP mdp = random_finite_mdp(3, 2, 0.9, rng);

  const Distribution point = dmdp_transition(mdp, Distribution::point_mass(6, 1 * 2 + 1));
  for (std::size_t y = 0; y < 3; ++y) CHECK(point[y] == mdp.p(y, 1, 1));
  CHECK(dmdp_cost(mdp, Distribution::point_mass(6, 2 * 2 + 0)) == mdp.c(2, 0));

  const Distribution n1 = random_distribution(6, rng);
  const Distribution n2 = random_distribution(6, rng);
  std::vector<double> mix(6);
  for (std::size_t i = 0; i < 6; ++i) mix[i] = 0.3 * n1[i] + 0.7 * n2[i];
  const Distribution pm = dmdp_transition(mdp, Distribution(mix));
  const Distribution p1 = dmdp_transition(mdp, n1);
  const Distribution p2 = dmdp_transition(mdp, n2);
  for (std::size_t y = 0; y < 3; ++y) CHECK(pm[y] == doctest::Approx(0.3 * p1[y] + 0.7 * p2[y]));

  double direct_cost = 0.0;
  for (std::size_t y = 0; y < 3; ++y) {
    double direct = 0.0;
    for (std::size_t x = 0; x < 3; ++x)
      for (std::size_t a = 0; a < 2; ++a) direct += mdp.p(y, x, a) * n1[x * 2 + a];
    CHECK(std::abs(p1[y] - direct) < 1e-15);
  }
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t a = 0; a < 2; ++a) direct_cost += mdp.c(x, a) * n1[x * 2 + a];
  CHECK(dmdp_cost(mdp, n1) == doctest::Approx(direct_cost).epsilon(1e-14));
  CHECK(dmdp_cost(mdp, n1) ==
        doctest::Approx(hs_inner(embed_cost(mdp), embed_distribution(n1))).epsilon(1e-14));

  const FiniteMDP unit(mdp.transitions(), {{1, 1}, {1, 1}, {1, 1}}, 0.9);
  CHECK(dmdp_cost(unit, n2) == doctest::Approx(1.0));
}

TEST_CASE("lift policy") {
  Rng rng = make_stream(24, 0);
  const StochasticKernel pi = random_kernel(3, 2, rng);
  const Distribution lifted = lift_policy(pi, Distribution::point_mass(3, 2));
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t a = 0; a < 2; ++a) CHECK(lifted[x * 2 + a] == (x == 2 ? pi.prob(a, x) : 0.0));

  const Distribution uni = lift_policy(StochasticKernel::uniform(3, 2), Distribution::uniform(3));
  for (std::size_t i = 0; i < 6; ++i) CHECK(uni[i] == doctest::Approx(1.0 / 6.0));

  for (int trial = 0; trial < 10; ++trial) {
    const Distribution mu = random_distribution(3, rng);
    const Distribution nu = lift_policy(random_kernel(3, 2, rng), mu);
    for (std::size_t x = 0; x < 3; ++x)
      CHECK(nu[x * 2] + nu[x * 2 + 1] == doctest::Approx(mu[x]).epsilon(1e-15));
  }
}

TEST_CASE("rollout cost matches policy evaluation for a stationary kernel") {
  Rng rng = make_stream(25, 0);
  const FiniteMDP mdp = random_finite_mdp(4, 3, 0.8, rng);
  const StochasticKernel pi = random_kernel(4, 3, rng);
  const Distribution mu0 = random_distribution(4, rng);
  const std::vector<StochasticKernel> kernels{pi};
  const double truncated = rollout_cost(mdp, kernels, mu0, 200);
  CHECK(truncated == doctest::Approx(evaluate_policy(mdp, pi, mu0)).epsilon(1e-12));
}

TEST_CASE("property: value iteration is monotone in the cost") {
  Rng rng = make_stream(26, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const FiniteMDP mdp = random_finite_mdp(4, 3, 0.9, rng);
    FiniteMDP::Costs higher = mdp.costs();
    std::uniform_real_distribution<double> bump(0.0, 0.5);
    for (auto& row : higher)
      for (double& c : row) c += bump(rng);
    const FiniteMDP upper(mdp.transitions(), higher, 0.9);
    const auto lo = value_iteration(mdp, 1e-10).values;
    const auto hi = value_iteration(upper, 1e-10).values;
    for (std::size_t x = 0; x < lo.size(); ++x) CHECK(lo[x] <= hi[x] + 1e-9);
  }
}

TEST_CASE("property: values are the Bellman fixed point") {
  Rng rng = make_stream(27, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const FiniteMDP mdp = random_finite_mdp(3, 3, 0.9, rng);
    const double eps = 1e-8;
    const ClassicalSolution sol = value_iteration(mdp, eps);
    CHECK(sup_diff(bellman_backup(mdp, sol.values), sol.values) <= eps);
    const auto exact = policy_values(mdp, StochasticKernel::deterministic(sol.policy, 3));
    CHECK(sup_diff(exact, sol.values) <= eps);
  }
}
