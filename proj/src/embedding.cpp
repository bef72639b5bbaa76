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


#include "qmdp/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmdp {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

DensityOperator embed_distribution(const Distribution& mu) {
  Matrix m = Matrix::Zero(idx(mu.size()), idx(mu.size()));
  for (std::size_t i = 0; i < mu.size(); ++i) m(idx(i), idx(i)) = std::max(0.0, mu[i]);
  return DensityOperator::from_channel_output(std::move(m));
}

KrausChannel embed_transition_channel(const FiniteMDP& mdp) {
  const std::size_t nx = mdp.n_states();
  const std::size_t na = mdp.n_actions();
  std::vector<Matrix> kraus;
  for (std::size_t y = 0; y < nx; ++y)
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t a = 0; a < na; ++a) {
        const double p = mdp.p(y, x, a);
        if (p <= 0.0) continue;
        Matrix k = Matrix::Zero(idx(nx), idx(nx * na));
        k(idx(y), idx(x * na + a)) = std::sqrt(p);
        kraus.push_back(std::move(k));
      }
  return KrausChannel(nx * na, nx, std::move(kraus));
}

KrausChannel embed_classical_policy(const StochasticKernel& pi) {
  const std::size_t nx = pi.n_states();
  const std::size_t na = pi.n_actions();
  std::vector<Matrix> kraus;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t a = 0; a < na; ++a) {
      const double w = pi.prob(a, x);
      if (w <= 0.0) continue;
      Matrix k = Matrix::Zero(idx(nx * na), idx(nx));
      k(idx(x * na + a), idx(x)) = std::sqrt(w);
      kraus.push_back(std::move(k));
    }
  return KrausChannel(nx, nx * na, std::move(kraus));
}

HermitianObservable embed_cost(const FiniteMDP& mdp) {
  const std::size_t nx = mdp.n_states();
  const std::size_t na = mdp.n_actions();
  Matrix m = Matrix::Zero(idx(nx * na), idx(nx * na));
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t a = 0; a < na; ++a) m(idx(x * na + a), idx(x * na + a)) = mdp.c(x, a);
  return HermitianObservable(std::move(m));
}

EmbeddedModel embed_model(const FiniteMDP& mdp) {
  return EmbeddedModel{mdp, mdp.n_states(), mdp.n_actions(), embed_transition_channel(mdp),
                       embed_cost(mdp)};
}

EquivalenceReport verify_equivalence(const FiniteMDP& mdp, const StochasticKernel& pi,
                                     const Distribution& mu0, std::size_t horizon) {
  if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");
  const KrausChannel transition = embed_transition_channel(mdp);
  const KrausChannel gamma = embed_classical_policy(pi);
  const HermitianObservable cost = embed_cost(mdp);

  EquivalenceReport report;
  report.horizon = horizon;
  Distribution mu = mu0;
  DensityOperator rho = embed_distribution(mu0);
  double discount = 1.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const Distribution nu = lift_policy(pi, mu);
    const DensityOperator sigma = apply_channel(gamma, rho);

    report.max_state_discrepancy =
        std::max({report.max_state_discrepancy, hs_distance(rho, embed_distribution(mu)),
                  hs_distance(sigma, embed_distribution(nu))});

    const double c_classical = dmdp_cost(mdp, nu);
    const double c_quantum = hs_inner(cost, sigma);
    report.max_cost_discrepancy =
        std::max(report.max_cost_discrepancy, std::abs(c_classical - c_quantum));
    report.classical_cost += discount * c_classical;
    report.quantum_cost += discount * c_quantum;
    discount *= mdp.beta();

    mu = dmdp_transition(mdp, nu);
    rho = apply_channel(transition, sigma);
  }
  report.max_state_discrepancy =
      std::max(report.max_state_discrepancy, hs_distance(rho, embed_distribution(mu)));
  return report;
}

}  // namespace qmdp
