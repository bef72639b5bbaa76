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


#include "qmdp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace qmdp {

namespace {

constexpr double kDiagonalTol = 1e-12;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

double operator_norm(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double continuation(const SuccessorWeights& w, std::span<const double> values) {
  double s = 0.0;
  for (const auto& [j, p] : w) s += p * values[j];
  return s;
}

}  // namespace

std::string to_string(Continuation rule) {
  return rule == Continuation::nearest ? "nearest" : "basis_mixture";
}

Continuation continuation_from_string(const std::string& name) {
  if (name == "nearest") return Continuation::nearest;
  if (name == "basis_mixture" || name == "mixture") return Continuation::basis_mixture;
  throw std::invalid_argument("unknown continuation rule: " + name);
}

void SolverConfig::check() const {
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  require(eps > 0.0, "eps must be positive");
  require(max_iters > 0, "max_iters must be positive");
}

// ---------------------------------------------------------------------------

GridBellman::GridBellman(StateGrid grid, ChannelNet net, KrausChannel transition,
                         HermitianObservable cost, Continuation rule, std::size_t threads)
    : grid_(std::move(grid)),
      net_(std::move(net)),
      transition_(std::move(transition)),
      cost_(std::move(cost)),
      rule_(rule) {
  require(net_.size() > 0, "channel net is empty");
  require(net_[0].in_dim() == grid_.dim() && transition_.out_dim() == grid_.dim(),
          "grid, net and transition dimensions disagree");
  require(net_[0].out_dim() == transition_.in_dim() && cost_.dim() == transition_.in_dim(),
          "net output must match the transition input and cost");

  const std::size_t d = grid_.dim();
  basis_index_.assign(d, grid_.size());
  for (std::size_t x = 0; x < d; ++x) {
    const Matrix e = matrix_unit(d, x, x);
    for (std::size_t i = 0; i < grid_.size(); ++i)
      if (hs_distance(grid_[i].matrix(), e) <= kDiagonalTol) {
        basis_index_[x] = i;
        break;
      }
  }
  if (std::any_of(basis_index_.begin(), basis_index_.end(),
                  [this](std::size_t i) { return i == grid_.size(); }))
    basis_index_.clear();

  const std::size_t nk = net_.size();
  stage_.assign(grid_.size() * nk, 0.0);
  next_.assign(grid_.size() * nk, {});
  parallel_for(grid_.size(), threads, [&](std::size_t i) {
    for (std::size_t k = 0; k < nk; ++k) {
      const Matrix sigma = net_[k].apply(grid_[i].matrix());
      stage_[i * nk + k] = hs_inner(cost_, sigma);
      next_[i * nk + k] = lookup(transition_.apply(sigma));
    }
  });
}

SuccessorWeights GridBellman::lookup(const Matrix& next) const {
  if (rule_ == Continuation::basis_mixture && !basis_index_.empty() &&
      max_off_diagonal(next) <= kDiagonalTol) {
    SuccessorWeights w;
    double total = 0.0;
    for (std::size_t x = 0; x < basis_index_.size(); ++x) {
      const double p = std::max(0.0, next(idx(x), idx(x)).real());
      if (p > 0.0) {
        w.emplace_back(basis_index_[x], p);
        total += p;
      }
    }
    for (auto& [j, p] : w) p /= total;
    return w;
  }
  return {{nearest_grid_point(next, grid_), 1.0}};
}

std::vector<double> GridBellman::apply(std::span<const double> values, double beta,
                                       std::vector<std::size_t>* argmin) const {
  require(values.size() == grid_.size(), "value vector does not match the grid");
  const std::size_t nk = net_.size();
  std::vector<double> out(grid_.size());
  if (argmin) argmin->assign(grid_.size(), 0);
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < nk; ++k) {
      const double q = stage_[i * nk + k] + beta * continuation(next_[i * nk + k], values);
      if (q < best) {
        best = q;
        best_k = k;
      }
    }
    out[i] = best;
    if (argmin) (*argmin)[i] = best_k;
  }
  return out;
}

std::size_t GridBellman::greedy_action(const DensityOperator& rho, std::span<const double> values,
                                       double beta) const {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < net_.size(); ++k) {
    const Matrix sigma = net_[k].apply(rho.matrix());
    const double q =
        hs_inner(cost_, sigma) + beta * continuation(lookup(transition_.apply(sigma)), values);
    if (q < best) {
      best = q;
      best_k = k;
    }
  }
  return best_k;
}

GridValueFunction bellman_apply(const GridValueFunction& v, const ChannelNet& net,
                                const KrausChannel& transition, const HermitianObservable& cost,
                                double beta, const StateGrid& grid, Continuation rule) {
  const GridBellman op(grid, net, transition, cost, rule);
  return {op.apply(v.values, beta)};
}

ValueIterationResult value_iterate(const SolverConfig& config, const GridBellman& bellman) {
  config.check();
  const double threshold = config.eps * (1.0 - config.beta) / (2.0 * config.beta);
  ValueIterationResult r;
  r.v.values.assign(bellman.grid_size(), 0.0);
  while (r.iters < config.max_iters) {
    std::vector<double> next = bellman.apply(r.v.values, config.beta);
    double diff = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i)
      diff = std::max(diff, std::abs(next[i] - r.v.values[i]));
    r.v.values = std::move(next);
    ++r.iters;
    r.residual = diff;
    r.residual_history.push_back(diff);
    if (diff <= threshold) {
      r.converged = true;
      break;
    }
  }
  bellman.apply(r.v.values, config.beta, &r.policy.indices);
  return r;
}

ValueIterationResult value_iterate(const SolverConfig& config, const ChannelNet& net,
                                   const KrausChannel& transition,
                                   const HermitianObservable& cost, const StateGrid& grid) {
  const GridBellman op(grid, net, transition, cost, config.continuation, config.threads);
  return value_iterate(config, op);
}

// ---------------------------------------------------------------------------

namespace {

template <typename ChooseChannel>
RolloutResult run_rollout(ChooseChannel&& choose, const KrausChannel& transition,
                          const HermitianObservable& cost, const DensityOperator& rho0,
                          double beta, std::size_t horizon, Criterion criterion,
                          const HermitianObservable* terminal_cost) {
  require(horizon >= 1, "horizon must be at least 1");
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  RolloutResult r;
  DensityOperator rho = rho0;
  r.states.push_back(rho);
  double discount = 1.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const KrausChannel& gamma = choose(t, rho, r);
    const Matrix sigma = gamma.apply(rho.matrix());
    const double stage = hs_inner(cost, sigma);
    r.stage_costs.push_back(stage);
    r.value += (criterion == Criterion::discounted ? discount : 1.0) * stage;
    discount *= beta;
    rho = DensityOperator::from_channel_output(transition.apply(sigma));
    r.states.push_back(rho);
  }
  if (criterion == Criterion::discounted) {
    r.truncation_bound = discount * operator_norm(cost.matrix()) / (1.0 - beta);
  } else if (terminal_cost) {
    r.value += hs_inner(*terminal_cost, rho);
  }
  return r;
}

}  // namespace

RolloutResult rollout(const MarkovQuantumPolicy& policy, const KrausChannel& transition,
                      const HermitianObservable& cost, const DensityOperator& rho0, double beta,
                      std::size_t horizon, Criterion criterion,
                      const HermitianObservable* terminal_cost) {
  return run_rollout(
      [&policy](std::size_t t, const DensityOperator&, RolloutResult&) -> const KrausChannel& {
        return policy.at(t);
      },
      transition, cost, rho0, beta, horizon, criterion, terminal_cost);
}

RolloutResult rollout(const GridBellman& bellman, std::span<const double> values,
                      const DensityOperator& rho0, double beta, std::size_t horizon,
                      Criterion criterion, const HermitianObservable* terminal_cost) {
  return run_rollout(
      [&](std::size_t, const DensityOperator& rho, RolloutResult& r) -> const KrausChannel& {
        const std::size_t k = bellman.greedy_action(rho, values, beta);
        r.actions.push_back(k);
        return bellman.net()[k];
      },
      bellman.transition(), bellman.cost(), rho0, beta, horizon, criterion, terminal_cost);
}

// ---------------------------------------------------------------------------

KrausChannel measure_prepare_channel(const std::vector<Matrix>& povm, std::size_t dim_x) {
  require(povm.size() == dim_x, "POVM needs one element per basis state of H_X");
  const Eigen::Index n = povm.front().rows();
  Matrix total = Matrix::Zero(n, n);
  std::vector<Matrix> kraus;
  for (std::size_t x = 0; x < dim_x; ++x) {
    const Matrix& el = povm[x];
    require(el.rows() == n && el.cols() == n, "POVM elements have different shapes");
    require(hermitian_residual(el) <= 1e-9, "POVM element is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (el + el.adjoint()));
    require(es.eigenvalues().minCoeff() >= -1e-9, "POVM element is not positive semi-definite");
    total += el;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double mu = es.eigenvalues()(k);
      if (mu <= 1e-15) continue;
      Matrix kr = Matrix::Zero(idx(dim_x), n);
      kr.row(idx(x)) = std::sqrt(mu) * es.eigenvectors().col(k).adjoint();
      kraus.push_back(std::move(kr));
    }
  }
  require((total - Matrix::Identity(n, n)).norm() <= 1e-9, "POVM elements do not sum to identity");
  return KrausChannel(static_cast<std::size_t>(n), dim_x, std::move(kraus));
}

std::vector<Matrix> coarse_basis_povm(std::size_t dim_x, std::size_t dim_a) {
  std::vector<Matrix> povm;
  const Matrix id_a = Matrix::Identity(idx(dim_a), idx(dim_a));
  for (std::size_t x = 0; x < dim_x; ++x)
    povm.push_back(tensor_product(matrix_unit(dim_x, x, x), id_a));
  return povm;
}

HermitianObservable state_prep_cost(const Vector& target, std::size_t dim_a) {
  require(target.size() > 0 && std::abs(target.norm() - 1.0) <= 1e-9,
          "target must be a unit vector");
  const Eigen::Index n = target.size() * idx(dim_a);
  const Matrix proj = tensor_product(target * target.adjoint(),
                                     Matrix::Identity(idx(dim_a), idx(dim_a)));
  Matrix c = Matrix::Identity(n, n) - proj;
  c = 0.5 * (c + c.adjoint()).eval();
  return HermitianObservable(std::move(c));
}

StatePrepReport state_prep_demo(const StatePrepConfig& config) {
  config.solver.check();
  const std::size_t dx = config.dim_x;
  const std::size_t da = config.dim_a;
  require(static_cast<std::size_t>(config.target.size()) == dx, "target has the wrong dimension");
  const HermitianObservable cost = state_prep_cost(config.target, da);
  Vector initial = config.initial;
  if (initial.size() == 0) {
    initial = Vector::Zero(idx(dx));
    initial(0) = 1.0;
  }
  require(static_cast<std::size_t>(initial.size()) == dx, "initial state has the wrong dimension");
  const DensityOperator rho0 = DensityOperator::pure(initial);

  const KrausChannel transition =
      measure_prepare_channel(config.povm ? *config.povm : coarse_basis_povm(dx, da), dx);
  const StateGrid grid = build_state_grid(dx, config.n, config.seed);
  const ChannelNet net = build_channel_net(dx, da, config.n, config.seed, config.sources);
  const GridBellman op(grid, net, transition, cost, config.solver.continuation,
                       config.solver.threads);

  StatePrepReport report;
  report.grid_provenance = grid.provenance();
  report.net_provenance = net.provenance();
  report.grid_size = grid.size();
  report.net_size = net.size();
  report.initial_grid_index = nearest_grid_point(rho0, grid);
  report.min_cost_sample = std::numeric_limits<double>::infinity();
  report.max_cost_sample = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t k = 0; k < net.size(); ++k) {
      report.min_cost_sample = std::min(report.min_cost_sample, op.stage_cost(i, k));
      report.max_cost_sample = std::max(report.max_cost_sample, op.stage_cost(i, k));
    }

  report.solution = value_iterate(config.solver, op);
  const std::size_t horizon = config.solver.horizon_for_rollout;
  report.greedy = rollout(op, report.solution.v.values, rho0, config.solver.beta, horizon);
  for (const auto& rho : report.greedy.states)
    report.fidelity_trajectory.push_back(fidelity_pure(rho, config.target));

  // Open-loop baseline: every stationary appending channel over the xi-grid.
  const StateGrid xi_grid = build_xi_grid(da, config.n, config.seed);
  report.baseline_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xi_grid.size(); ++i) {
    const auto policy =
        MarkovQuantumPolicy::stationary(open_loop_channel(xi_grid[i], dx), PolicyKind::open_loop);
    const double v = rollout(policy, transition, cost, rho0, config.solver.beta, horizon).value;
    if (v < report.baseline_cost) {
      report.baseline_cost = v;
      report.baseline_index = i;
    }
  }
  return report;
}

}  // namespace qmdp
