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
#include <functional>
#include <string>
#include <vector>

#include "qmdp/classical_mdp.hpp"
#include "qmdp/embedding.hpp"
#include "qmdp/quantum_core.hpp"

namespace qmdp {

/// Outcome probabilities at or below this value are never conditioned on.
inline constexpr double kProbFloor = 1e-12;

/// Quantum observable MDP: per action a measurement channel whose Kraus
/// operators are indexed by outcomes, followed by an outcome-independent
/// channel, with stage cost C(rho, a) = Tr(c_a rho).
class QOMDPModel {
 public:
  /// Divisible channels with fewer Kraus operators than outcomes are padded
  /// with zero operators. An empty observation list is filled with names
  /// "m0", "m1", ... up to the largest Kraus count.
  QOMDPModel(std::size_t dim, std::vector<std::string> actions,
             std::vector<std::string> observations, std::vector<KrausChannel> divisible,
             std::vector<KrausChannel> indivisible, std::vector<HermitianObservable> costs,
             double beta);

  std::size_t dim() const { return dim_; }
  std::size_t n_actions() const { return actions_.size(); }
  std::size_t n_observations() const { return observations_.size(); }
  const std::vector<std::string>& action_names() const { return actions_; }
  const std::vector<std::string>& observation_names() const { return observations_; }
  const KrausChannel& divisible(std::size_t a) const { return divisible_[a]; }
  const KrausChannel& indivisible(std::size_t a) const { return indivisible_[a]; }
  const HermitianObservable& cost_observable(std::size_t a) const { return costs_[a]; }
  double beta() const { return beta_; }

  double cost(const DensityOperator& rho, std::size_t a) const;

  /// max_a ||c_a||_op
  double cost_bound() const;

 private:
  std::size_t dim_;
  std::vector<std::string> actions_;
  std::vector<std::string> observations_;
  std::vector<KrausChannel> divisible_;
  std::vector<KrausChannel> indivisible_;
  std::vector<HermitianObservable> costs_;
  double beta_;
};

/// P(m | rho, a) = Tr(K_m rho K_m^dagger) for the divisible channel of a.
Distribution outcome_distribution(const QOMDPModel& model, const DensityOperator& rho,
                                  std::size_t a);

/// f(rho, a, m): condition on outcome m, then apply the indivisible channel.
/// Throws std::domain_error when P(m | rho, a) <= kProbFloor.
DensityOperator qomdp_step(const QOMDPModel& model, const DensityOperator& rho, std::size_t a,
                           std::size_t m);

using StatePolicy = std::function<std::size_t(const DensityOperator&)>;

struct MonteCarloResult {
  double mean = 0.0;
  double std_error = 0.0;
  double truncation_bound = 0.0;  ///< beta^horizon * cost_bound / (1 - beta)
  std::size_t horizon = 0;
  std::size_t n_traj = 0;
};

/// Smallest horizon with beta^horizon * cost_bound / (1 - beta) <= budget.
std::size_t horizon_for_budget(double beta, double cost_bound, double budget);

/// Sample mean and standard error of the truncated discounted cost. Trajectory
/// k draws from make_stream(seed, k), so results do not depend on `threads`.
MonteCarloResult monte_carlo_value(const QOMDPModel& model, const StatePolicy& policy,
                                   const DensityOperator& rho0, std::size_t horizon,
                                   std::size_t n_traj, std::uint64_t seed,
                                   std::size_t threads = 1);

// ---------------------------------------------------------------------------
// State grids

struct GridProvenance {
  std::string construction;
  std::size_t dim = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

/// Finite set of pairwise distinct density operators of a common dimension.
class StateGrid {
 public:
  StateGrid(std::vector<DensityOperator> points, double resolution, GridProvenance provenance);

  std::size_t size() const { return points_.size(); }
  std::size_t dim() const { return points_.front().dim(); }
  const DensityOperator& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<DensityOperator>& points() const { return points_; }
  double resolution() const { return resolution_; }
  const GridProvenance& provenance() const { return provenance_; }

 private:
  std::vector<DensityOperator> points_;
  double resolution_;
  GridProvenance provenance_;
};

/// Eigenvalue vectors on the simplex with denominators 1..n, in a fixed order.
std::vector<std::vector<double>> simplex_lattice(std::size_t parts, std::size_t n);

/// Basis states, the maximally mixed state, and U diag(lambda) U^dagger for
/// lambda in simplex_lattice(dim, n) and the first n * dim Haar unitaries of
/// the seeded stream. Grids for n <= n' with the same seed are nested.
StateGrid build_state_grid(std::size_t dim, std::size_t n, std::uint64_t seed);

/// max over sampled states of the distance to the nearest grid point. Half the
/// samples are Haar pure states, half Hilbert-Schmidt mixed states.
double estimate_covering_radius(const StateGrid& grid, std::size_t n_samples,
                                std::uint64_t seed);

/// Index of the HS-nearest grid point, ties to the lowest index.
std::size_t nearest_grid_point(const DensityOperator& rho, const StateGrid& grid);
std::size_t nearest_grid_point(const Matrix& rho, const StateGrid& grid);

/// Finite-state MDP on grid indices with point-mass cell measures:
/// c_n(i, a) = C(x_i, a), p_n(j | i, a) = sum over outcomes m with
/// Q_n(f(x_i, a, m)) = j of P(m | x_i, a).
FiniteMDP quantize_cqomdp(const QOMDPModel& model, const StateGrid& grid);

/// rho -> fn[nearest_grid_point(rho)]
class ExtendedPolicy {
 public:
  ExtendedPolicy(std::vector<std::size_t> fn, StateGrid grid);

  std::size_t operator()(const DensityOperator& rho) const;
  const std::vector<std::size_t>& table() const { return fn_; }

 private:
  std::vector<std::size_t> fn_;
  StateGrid grid_;
};

ExtendedPolicy extend_policy(std::vector<std::size_t> fn, const StateGrid& grid);

// ---------------------------------------------------------------------------
// Channel nets

struct NetSources {
  bool classical = true;
  bool appending = true;
  bool closed_loop = true;
};

/// Parses "classical,appending,closed_loop" (any subset).
NetSources parse_sources(const std::string& list);
std::string to_string(const NetSources& sources);

struct NetProvenance {
  std::size_t dim_x = 0;
  std::size_t dim_a = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  NetSources sources;
  std::size_t user_channels = 0;
};

/// Finite set of policy channels H_X -> H_X (x) H_A with a label per channel.
class ChannelNet {
 public:
  ChannelNet(std::vector<KrausChannel> channels, std::vector<std::string> labels,
             NetProvenance provenance);

  std::size_t size() const { return channels_.size(); }
  const KrausChannel& operator[](std::size_t i) const { return channels_[i]; }
  const std::vector<KrausChannel>& channels() const { return channels_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const NetProvenance& provenance() const { return provenance_; }

 private:
  std::vector<KrausChannel> channels_;
  std::vector<std::string> labels_;
  NetProvenance provenance_;
};

/// Grid of appended states xi used by the appending part of a channel net.
StateGrid build_xi_grid(std::size_t dim_a, std::size_t n, std::uint64_t seed);

/// Structured net: classical kernels on the simplex lattice (deterministic
/// kernels first), appending channels over build_xi_grid(dim_a, n, seed),
/// 2n closed-loop channels from seeded phi families, then `user` channels.
/// Nets for n <= n' with the same seed and sources are nested.
ChannelNet build_channel_net(std::size_t dim_x, std::size_t dim_a, std::size_t n,
                             std::uint64_t seed, NetSources sources,
                             std::vector<KrausChannel> user = {});

/// q-MDP restricted to the actions of `net`: identity measurement, dynamics
/// N o gamma_a, cost C(rho, a) = <c, gamma_a(rho)>.
QOMDPModel build_finite_action_qmdp(const KrausChannel& transition,
                                    const HermitianObservable& cost, double beta,
                                    const ChannelNet& net);
QOMDPModel build_finite_action_qmdp(const EmbeddedModel& model, const ChannelNet& net);

}  // namespace qmdp
