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
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qmdp/approximation.hpp"
#include "qmdp/policies.hpp"
#include "qmdp/quantum_core.hpp"

namespace qmdp {

/// How the value of a successor state N(gamma(rho_i)) is read off the grid.
enum class Continuation {
  /// Value at the nearest grid point.
  nearest,
  /// A successor diagonal in the computational basis is split over the basis
  /// states of the grid with its diagonal weights; anything else goes to the
  /// nearest grid point. Both rules are stochastic lookups, so the grid
  /// Bellman operator stays a monotone beta-contraction.
  basis_mixture,
};

std::string to_string(Continuation rule);
Continuation continuation_from_string(const std::string& name);

struct SolverConfig {
  double beta = 0.9;
  double eps = 1e-6;
  std::size_t max_iters = 100000;
  std::size_t horizon_for_rollout = 200;
  Continuation continuation = Continuation::basis_mixture;
  std::size_t threads = 1;

  void check() const;
};

struct GridValueFunction {
  std::vector<double> values;
};

/// Index into the channel net for every grid point.
struct GreedyPolicy {
  std::vector<std::size_t> indices;
};

using SuccessorWeights = std::vector<std::pair<std::size_t, double>>;

/// Grid-restricted dynamic programming operator
///   (L V)(rho_i) = min_k <c, gamma_k(rho_i)> + beta V(N(gamma_k(rho_i)))
/// with stage costs and successor lookups precomputed for every (i, k).
class GridBellman {
 public:
  GridBellman(StateGrid grid, ChannelNet net, KrausChannel transition, HermitianObservable cost,
              Continuation rule = Continuation::basis_mixture, std::size_t threads = 1);

  std::size_t grid_size() const { return grid_.size(); }
  std::size_t net_size() const { return net_.size(); }
  const StateGrid& grid() const { return grid_; }
  const ChannelNet& net() const { return net_; }
  const KrausChannel& transition() const { return transition_; }
  const HermitianObservable& cost() const { return cost_; }
  Continuation rule() const { return rule_; }

  double stage_cost(std::size_t i, std::size_t k) const { return stage_[i * net_.size() + k]; }
  const SuccessorWeights& successor(std::size_t i, std::size_t k) const {
    return next_[i * net_.size() + k];
  }

  /// Applies the operator; ties in the argmin go to the lowest channel index.
  std::vector<double> apply(std::span<const double> values, double beta,
                            std::vector<std::size_t>* argmin = nullptr) const;

  /// Grid lookup weights for an arbitrary successor state.
  SuccessorWeights lookup(const Matrix& next) const;

  /// One-step lookahead at an arbitrary state, ties to the lowest index.
  std::size_t greedy_action(const DensityOperator& rho, std::span<const double> values,
                            double beta) const;

 private:
  StateGrid grid_;
  ChannelNet net_;
  KrausChannel transition_;
  HermitianObservable cost_;
  Continuation rule_;
  std::vector<std::size_t> basis_index_;  // grid index of |x><x|, empty if missing
  std::vector<double> stage_;
  std::vector<SuccessorWeights> next_;
};

/// Single application of the grid operator.
GridValueFunction bellman_apply(const GridValueFunction& v, const ChannelNet& net,
                                const KrausChannel& transition, const HermitianObservable& cost,
                                double beta, const StateGrid& grid,
                                Continuation rule = Continuation::basis_mixture);

struct ValueIterationResult {
  GridValueFunction v;
  GreedyPolicy policy;
  std::size_t iters = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<double> residual_history;
};

/// Iterates from V = 0 until the sup-norm change is at most
/// eps (1 - beta) / (2 beta) or max_iters sweeps have run.
ValueIterationResult value_iterate(const SolverConfig& config, const GridBellman& bellman);
ValueIterationResult value_iterate(const SolverConfig& config, const ChannelNet& net,
                                   const KrausChannel& transition,
                                   const HermitianObservable& cost, const StateGrid& grid);

enum class Criterion { discounted, finite_horizon };

struct RolloutResult {
  double value = 0.0;
  double truncation_bound = 0.0;  ///< discounted criterion only
  std::vector<double> stage_costs;
  std::vector<DensityOperator> states;  ///< rho_0 .. rho_horizon
  std::vector<std::size_t> actions;     ///< net indices, greedy rollouts only
};

/// Deterministic accumulation of sum_t beta^t <c, sigma_t> (or the undiscounted
/// sum plus an optional terminal cost <c_T, rho_T>) with sigma_t = gamma_t(rho_t)
/// and rho_{t+1} = N(sigma_t).
RolloutResult rollout(const MarkovQuantumPolicy& policy, const KrausChannel& transition,
                      const HermitianObservable& cost, const DensityOperator& rho0, double beta,
                      std::size_t horizon, Criterion criterion = Criterion::discounted,
                      const HermitianObservable* terminal_cost = nullptr);

/// Rollout of the greedy policy for `values`, acting by one-step lookahead at
/// the actual state.
RolloutResult rollout(const GridBellman& bellman, std::span<const double> values,
                      const DensityOperator& rho0, double beta, std::size_t horizon,
                      Criterion criterion = Criterion::discounted,
                      const HermitianObservable* terminal_cost = nullptr);

// ---------------------------------------------------------------------------
// State preparation

/// N(sigma) = sum_x Tr(Lambda_x sigma) |x><x| for a POVM {Lambda_x} on
/// H_X (x) H_A. Throws std::invalid_argument unless the elements are PSD and
/// sum to the identity within 1e-9.
KrausChannel measure_prepare_channel(const std::vector<Matrix>& povm, std::size_t dim_x);

/// Lambda_x = |x><x| (x) I_A.
std::vector<Matrix> coarse_basis_povm(std::size_t dim_x, std::size_t dim_a);

/// c = I - |psi><psi| (x) I_A
HermitianObservable state_prep_cost(const Vector& target, std::size_t dim_a);

struct StatePrepConfig {
  std::size_t dim_x = 2;
  std::size_t dim_a = 2;
  Vector target;
  Vector initial;                           ///< defaults to |0>
  std::optional<std::vector<Matrix>> povm;  ///< defaults to coarse_basis_povm
  std::size_t n = 2;
  std::uint64_t seed = 0;
  NetSources sources;
  SolverConfig solver;
};

struct StatePrepReport {
  ValueIterationResult solution;
  GridProvenance grid_provenance;
  NetProvenance net_provenance;
  std::size_t grid_size = 0;
  std::size_t net_size = 0;
  std::size_t initial_grid_index = 0;
  double min_cost_sample = 0.0;  ///< over all (grid point, net channel) pairs
  double max_cost_sample = 0.0;
  RolloutResult greedy;
  double baseline_cost = 0.0;  ///< best stationary appending channel
  std::size_t baseline_index = 0;
  std::vector<double> fidelity_trajectory;  ///< <psi|rho_t|psi>
};

StatePrepReport state_prep_demo(const StatePrepConfig& config);

}  // namespace qmdp
