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
#include <span>
#include <vector>

#include "qmdp/random.hpp"

namespace qmdp {

/// Probability vector over a finite set.
class Distribution {
 public:
  explicit Distribution(std::vector<double> weights);

  static Distribution point_mass(std::size_t size, std::size_t index);
  static Distribution uniform(std::size_t size);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> weights() const { return w_; }

 private:
  std::vector<double> w_;
};

/// Stochastic kernel pi(a|x) from states to actions.
class StochasticKernel {
 public:
  /// rows[x][a] = pi(a|x); each row must be a probability vector.
  explicit StochasticKernel(std::vector<std::vector<double>> rows);

  /// Deterministic kernel choosing action f[x] in state x.
  static StochasticKernel deterministic(std::span<const std::size_t> f, std::size_t n_actions);
  static StochasticKernel uniform(std::size_t n_states, std::size_t n_actions);

  std::size_t n_states() const { return rows_.size(); }
  std::size_t n_actions() const { return rows_.front().size(); }
  double prob(std::size_t a, std::size_t x) const { return rows_[x][a]; }
  std::span<const double> row(std::size_t x) const { return rows_[x]; }

 private:
  std::vector<std::vector<double>> rows_;
};

/// Finite discounted MDP (X, A, p, c, beta).
///
/// Transitions are stored as p[x][a][y] = p(y | x, a). Joint state-action
/// indices use (x, a) -> x * n_actions + a throughout the library.
class FiniteMDP {
 public:
  using Transitions = std::vector<std::vector<std::vector<double>>>;
  using Costs = std::vector<std::vector<double>>;

  FiniteMDP(Transitions p, Costs c, double beta);

  std::size_t n_states() const { return p_.size(); }
  std::size_t n_actions() const { return p_.front().size(); }
  double beta() const { return beta_; }

  double p(std::size_t y, std::size_t x, std::size_t a) const { return p_[x][a][y]; }
  std::span<const double> next_distribution(std::size_t x, std::size_t a) const {
    return p_[x][a];
  }
  double c(std::size_t x, std::size_t a) const { return c_[x][a]; }

  const Transitions& transitions() const { return p_; }
  const Costs& costs() const { return c_; }

  /// max |c(x, a)|
  double max_abs_cost() const;

 private:
  Transitions p_;
  Costs c_;
  double beta_;
};

struct ClassicalSolution {
  std::vector<double> values;
  std::vector<std::size_t> policy;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Random model with Dirichlet(1) transition rows and costs uniform in [0, 1).
FiniteMDP random_finite_mdp(std::size_t n_states, std::size_t n_actions, double beta, Rng& rng);
StochasticKernel random_kernel(std::size_t n_states, std::size_t n_actions, Rng& rng);
Distribution random_distribution(std::size_t size, Rng& rng);

/// Value iteration from V = 0. Stops once successive iterates differ by at most
/// eps (1 - beta) / (2 beta) in sup-norm, which places the result within eps of
/// the fixed point. The returned policy is greedy for the returned values, ties
/// going to the lowest action index.
ClassicalSolution value_iteration(const FiniteMDP& mdp, double eps);

/// One Bellman backup; `greedy` receives the argmin actions when non-null.
std::vector<double> bellman_backup(const FiniteMDP& mdp, std::span<const double> values,
                                   std::vector<std::size_t>* greedy = nullptr);

/// Exact discounted cost of a stationary policy from mu0, by solving
/// (I - beta P_pi) v = c_pi.
double evaluate_policy(const FiniteMDP& mdp, const StochasticKernel& pi, const Distribution& mu0);

/// Per-state values of a stationary policy.
std::vector<double> policy_values(const FiniteMDP& mdp, const StochasticKernel& pi);

/// P(nu)(y) = sum_{x,a} p(y | x, a) nu(x, a).
Distribution dmdp_transition(const FiniteMDP& mdp, const Distribution& nu);

/// C(nu) = sum_{x,a} c(x, a) nu(x, a).
double dmdp_cost(const FiniteMDP& mdp, const Distribution& nu);

/// (mu (x) pi)(x, a) = mu(x) pi(a|x).
Distribution lift_policy(const StochasticKernel& pi, const Distribution& mu);

/// Discounted cost of a nonstationary policy over a finite horizon, by the
/// deterministic recursion mu_{t+1} = P(mu_t (x) pi_t). The last kernel is
/// reused once the sequence runs out.
double rollout_cost(const FiniteMDP& mdp, std::span<const StochasticKernel> kernels,
                    const Distribution& mu0, std::size_t horizon);

}  // namespace qmdp
