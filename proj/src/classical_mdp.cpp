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


#include "qmdp/classical_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qmdp {

namespace {

constexpr double kSimplexTol = 1e-12;

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

bool is_probability_vector(std::span<const double> w) {
  if (w.empty()) return false;
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= -kSimplexTol) || !std::isfinite(v)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= kSimplexTol * std::max<double>(1.0, w.size());
}

std::vector<double> dirichlet_one(std::size_t size, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(size);
  for (auto& v : w) v = expo(rng);
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= s;
  return w;
}

}  // namespace

Distribution::Distribution(std::vector<double> weights) : w_(std::move(weights)) {
  require(is_probability_vector(w_), "weights are not a probability vector");
}

Distribution Distribution::point_mass(std::size_t size, std::size_t index) {
  require(index < size, "point mass index out of range");
  std::vector<double> w(size, 0.0);
  w[index] = 1.0;
  return Distribution(std::move(w));
}

Distribution Distribution::uniform(std::size_t size) {
  require(size > 0, "empty distribution");
  return Distribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

StochasticKernel::StochasticKernel(std::vector<std::vector<double>> rows)
    : rows_(std::move(rows)) {
  require(!rows_.empty(), "kernel needs at least one state");
  const std::size_t na = rows_.front().size();
  for (const auto& r : rows_) {
    require(r.size() == na, "kernel rows have different lengths");
    require(is_probability_vector(r), "kernel row is not a probability vector");
  }
}

StochasticKernel StochasticKernel::deterministic(std::span<const std::size_t> f,
                                                 std::size_t n_actions) {
  std::vector<std::vector<double>> rows(f.size(), std::vector<double>(n_actions, 0.0));
  for (std::size_t x = 0; x < f.size(); ++x) {
    require(f[x] < n_actions, "action index out of range");
    rows[x][f[x]] = 1.0;
  }
  return StochasticKernel(std::move(rows));
}

StochasticKernel StochasticKernel::uniform(std::size_t n_states, std::size_t n_actions) {
  return StochasticKernel(std::vector<std::vector<double>>(
      n_states, std::vector<double>(n_actions, 1.0 / static_cast<double>(n_actions))));
}

FiniteMDP::FiniteMDP(Transitions p, Costs c, double beta)
    : p_(std::move(p)), c_(std::move(c)), beta_(beta) {
  require(beta_ > 0.0 && beta_ < 1.0, "discount factor must lie in (0, 1)");
  require(!p_.empty() && !p_.front().empty(), "model needs states and actions");
  const std::size_t nx = p_.size();
  const std::size_t na = p_.front().size();
  require(c_.size() == nx, "cost table has the wrong number of states");
  for (std::size_t x = 0; x < nx; ++x) {
    require(p_[x].size() == na, "transition table has ragged actions");
    require(c_[x].size() == na, "cost table has ragged actions");
    for (std::size_t a = 0; a < na; ++a) {
      require(p_[x][a].size() == nx, "transition row has the wrong length");
      require(is_probability_vector(p_[x][a]), "transition row is not a probability vector");
      require(std::isfinite(c_[x][a]), "cost must be finite");
    }
  }
}

double FiniteMDP::max_abs_cost() const {
  double m = 0.0;
  for (const auto& row : c_)
    for (double v : row) m = std::max(m, std::abs(v));
  return m;
}

FiniteMDP random_finite_mdp(std::size_t n_states, std::size_t n_actions, double beta, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  FiniteMDP::Transitions p(n_states, std::vector<std::vector<double>>(n_actions));
  FiniteMDP::Costs c(n_states, std::vector<double>(n_actions));
  for (std::size_t x = 0; x < n_states; ++x)
    for (std::size_t a = 0; a < n_actions; ++a) {
      p[x][a] = dirichlet_one(n_states, rng);
      c[x][a] = unit(rng);
    }
  return FiniteMDP(std::move(p), std::move(c), beta);
}

StochasticKernel random_kernel(std::size_t n_states, std::size_t n_actions, Rng& rng) {
  std::vector<std::vector<double>> rows(n_states);
  for (auto& r : rows) r = dirichlet_one(n_actions, rng);
  return StochasticKernel(std::move(rows));
}

Distribution random_distribution(std::size_t size, Rng& rng) {
  return Distribution(dirichlet_one(size, rng));
}

std::vector<double> bellman_backup(const FiniteMDP& mdp, std::span<const double> values,
                                   std::vector<std::size_t>* greedy) {
  const std::size_t nx = mdp.n_states();
  const std::size_t na = mdp.n_actions();
  require(values.size() == nx, "value vector has the wrong length");
  std::vector<double> out(nx);
  if (greedy) greedy->assign(nx, 0);
  for (std::size_t x = 0; x < nx; ++x) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = 0;
    for (std::size_t a = 0; a < na; ++a) {
      const auto row = mdp.next_distribution(x, a);
      double q = 0.0;
      for (std::size_t y = 0; y < nx; ++y) q += row[y] * values[y];
      q = mdp.c(x, a) + mdp.beta() * q;
      if (q < best) {
        best = q;
        best_a = a;
      }
    }
    out[x] = best;
    if (greedy) (*greedy)[x] = best_a;
  }
  return out;
}

ClassicalSolution value_iteration(const FiniteMDP& mdp, double eps) {
  require(eps > 0.0, "eps must be positive");
  const double beta = mdp.beta();
  const double threshold = eps * (1.0 - beta) / (2.0 * beta);
  ClassicalSolution sol;
  sol.values.assign(mdp.n_states(), 0.0);
  while (true) {
    std::vector<double> next = bellman_backup(mdp, sol.values);
    double diff = 0.0;
    for (std::size_t x = 0; x < next.size(); ++x)
      diff = std::max(diff, std::abs(next[x] - sol.values[x]));
    sol.values = std::move(next);
    ++sol.iterations;
    sol.residual = diff;
    if (diff <= threshold) break;
  }
  bellman_backup(mdp, sol.values, &sol.policy);
  return sol;
}

std::vector<double> policy_values(const FiniteMDP& mdp, const StochasticKernel& pi) {
  const std::size_t nx = mdp.n_states();
  const std::size_t na = mdp.n_actions();
  require(pi.n_states() == nx && pi.n_actions() == na, "policy does not match the model");
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(nx),
                                                  static_cast<Eigen::Index>(nx));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nx));
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t a = 0; a < na; ++a) {
      const double w = pi.prob(a, x);
      rhs(static_cast<Eigen::Index>(x)) += w * mdp.c(x, a);
      for (std::size_t y = 0; y < nx; ++y)
        lhs(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) -=
            mdp.beta() * w * mdp.p(y, x, a);
    }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  if (!lu.isInvertible()) throw std::runtime_error("policy evaluation system is singular");
  const Eigen::VectorXd v = lu.solve(rhs);
  return {v.data(), v.data() + v.size()};
}

double evaluate_policy(const FiniteMDP& mdp, const StochasticKernel& pi, const Distribution& mu0) {
  require(mu0.size() == mdp.n_states(), "initial distribution does not match the model");
  const auto v = policy_values(mdp, pi);
  double total = 0.0;
  for (std::size_t x = 0; x < v.size(); ++x) total += mu0[x] * v[x];
  return total;
}

Distribution dmdp_transition(const FiniteMDP& mdp, const Distribution& nu) {
  const std::size_t nx = mdp.n_states();
  const std::size_t na = mdp.n_actions();
  require(nu.size() == nx * na, "state-action distribution does not match the model");
  std::vector<double> out(nx, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t a = 0; a < na; ++a) {
      const double w = nu[x * na + a];
      if (w == 0.0) continue;
      const auto row = mdp.next_distribution(x, a);
      for (std::size_t y = 0; y < nx; ++y) out[y] += w * row[y];
    }
  return Distribution(std::move(out));
}

double dmdp_cost(const FiniteMDP& mdp, const Distribution& nu) {
  const std::size_t na = mdp.n_actions();
  require(nu.size() == mdp.n_states() * na, "state-action distribution does not match the model");
  double total = 0.0;
  for (std::size_t x = 0; x < mdp.n_states(); ++x)
    for (std::size_t a = 0; a < na; ++a) total += mdp.c(x, a) * nu[x * na + a];
  return total;
}

Distribution lift_policy(const StochasticKernel& pi, const Distribution& mu) {
  require(mu.size() == pi.n_states(), "distribution does not match the kernel");
  const std::size_t na = pi.n_actions();
  std::vector<double> out(mu.size() * na);
  for (std::size_t x = 0; x < mu.size(); ++x)
    for (std::size_t a = 0; a < na; ++a) out[x * na + a] = mu[x] * pi.prob(a, x);
  return Distribution(std::move(out));
}

double rollout_cost(const FiniteMDP& mdp, std::span<const StochasticKernel> kernels,
                    const Distribution& mu0, std::size_t horizon) {
  require(!kernels.empty(), "rollout needs at least one kernel");
  Distribution mu = mu0;
  double total = 0.0;
  double discount = 1.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const auto& pi = kernels[std::min(t, kernels.size() - 1)];
    const Distribution nu = lift_policy(pi, mu);
    total += discount * dmdp_cost(mdp, nu);
    mu = dmdp_transition(mdp, nu);
    discount *= mdp.beta();
  }
  return total;
}

}  // namespace qmdp
