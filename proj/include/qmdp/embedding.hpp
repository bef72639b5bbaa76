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

#include "qmdp/classical_mdp.hpp"
#include "qmdp/quantum_core.hpp"

namespace qmdp {

/// Quantum form of a finite MDP in the computational basis. The joint basis
/// vector |x, a> has index x * dim_a + a.
struct EmbeddedModel {
  FiniteMDP source;
  std::size_t dim_x;
  std::size_t dim_a;
  KrausChannel transition;    ///< H_X (x) H_A -> H_X
  HermitianObservable cost;   ///< diag{c(x, a)}
};

/// diag{mu(e)}
DensityOperator embed_distribution(const Distribution& mu);

/// Kraus set {sqrt(p(y|x,a)) |y><x,a|}; entries with p = 0 are dropped.
KrausChannel embed_transition_channel(const FiniteMDP& mdp);

/// Kraus set {sqrt(pi(a|x)) |x,a><x|} over all (x, a) with pi(a|x) > 0.
/// Off-diagonal input blocks |x><y|, x != y, are mapped to zero.
KrausChannel embed_classical_policy(const StochasticKernel& pi);

HermitianObservable embed_cost(const FiniteMDP& mdp);

EmbeddedModel embed_model(const FiniteMDP& mdp);

struct EquivalenceReport {
  std::size_t horizon = 0;
  double max_cost_discrepancy = 0.0;   ///< max_t |<c, sigma_t> - C(nu_t)|
  double max_state_discrepancy = 0.0;  ///< max_t of HS distances for rho_t and sigma_t
  double classical_cost = 0.0;         ///< discounted d-MDP cost over the horizon
  double quantum_cost = 0.0;           ///< discounted q-MDP cost over the horizon
};

/// Runs the d-MDP recursion and its quantum counterpart
/// rho_{t+1} = N(gamma(rho_t)) side by side.
EquivalenceReport verify_equivalence(const FiniteMDP& mdp, const StochasticKernel& pi,
                                     const Distribution& mu0, std::size_t horizon);

}  // namespace qmdp
