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


#include "qmdp/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qmdp/policies.hpp"
#include "qmdp/random.hpp"

namespace qmdp {

namespace {

constexpr std::uint64_t kGridUnitaryTag = 0x6772696475ULL;  // "gridu"
constexpr std::uint64_t kCoverSampleTag = 0x636f766572ULL;  // "cover"
constexpr std::uint64_t kPhiTag = 0x706869ULL;              // "phi"
constexpr std::uint64_t kXiSeedMix = 0x9E3779B97F4A7C15ULL;
constexpr std::size_t kMaxClassicalKernels = 200000;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

void compositions(std::size_t total, std::size_t parts, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() + 1 == parts) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::size_t k = total + 1; k-- > 0;) {
    cur.push_back(k);
    compositions(total - k, parts, cur, out);
    cur.pop_back();
  }
}

double operator_norm(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<double> outcome_probabilities(const QOMDPModel& model, const Matrix& rho,
                                          std::size_t a) {
  const auto& kraus = model.divisible(a).kraus();
  std::vector<double> p(kraus.size());
  for (std::size_t m = 0; m < kraus.size(); ++m) {
    const Matrix& k = kraus[m];
    p[m] = std::max(0.0, (k * rho * k.adjoint()).trace().real());
  }
  return p;
}

DensityOperator conditioned_step(const QOMDPModel& model, const Matrix& rho, std::size_t a,
                                 std::size_t m, double prob) {
  const Matrix& k = model.divisible(a).kraus()[m];
  const DensityOperator half = DensityOperator::from_channel_output(k * rho * k.adjoint() / prob);
  return apply_channel(model.indivisible(a), half);
}

}  // namespace

// ---------------------------------------------------------------------------
// QOMDP

QOMDPModel::QOMDPModel(std::size_t dim, std::vector<std::string> actions,
                       std::vector<std::string> observations,
                       std::vector<KrausChannel> divisible,
                       std::vector<KrausChannel> indivisible,
                       std::vector<HermitianObservable> costs, double beta)
    : dim_(dim),
      actions_(std::move(actions)),
      observations_(std::move(observations)),
      indivisible_(std::move(indivisible)),
      costs_(std::move(costs)),
      beta_(beta) {
  require(dim_ > 0, "QOMDP dimension must be positive");
  require(!actions_.empty(), "QOMDP needs at least one action");
  require(beta_ > 0.0 && beta_ < 1.0, "discount factor must lie in (0, 1)");
  require(divisible.size() == actions_.size() && indivisible_.size() == actions_.size() &&
              costs_.size() == actions_.size(),
          "QOMDP needs one divisible channel, indivisible channel and cost per action");

  std::size_t max_kraus = 0;
  for (const auto& ch : divisible) max_kraus = std::max(max_kraus, ch.kraus().size());
  if (observations_.empty())
    for (std::size_t m = 0; m < max_kraus; ++m) observations_.push_back("m" + std::to_string(m));
  require(observations_.size() >= max_kraus, "more Kraus operators than observations");

  for (std::size_t a = 0; a < actions_.size(); ++a) {
    const auto& d = divisible[a];
    require(d.in_dim() == dim_ && d.out_dim() == dim_, "divisible channel has the wrong dimension");
    require(indivisible_[a].in_dim() == dim_ && indivisible_[a].out_dim() == dim_,
            "indivisible channel has the wrong dimension");
    require(costs_[a].dim() == dim_, "cost observable has the wrong dimension");
    std::vector<Matrix> padded = d.kraus();
    padded.resize(observations_.size(), Matrix::Zero(idx(dim_), idx(dim_)));
    divisible_.emplace_back(dim_, dim_, std::move(padded));
  }
}

double QOMDPModel::cost(const DensityOperator& rho, std::size_t a) const {
  return hs_inner(costs_.at(a), rho);
}

double QOMDPModel::cost_bound() const {
  double bound = 0.0;
  for (const auto& c : costs_) bound = std::max(bound, operator_norm(c.matrix()));
  return bound;
}

Distribution outcome_distribution(const QOMDPModel& model, const DensityOperator& rho,
                                  std::size_t a) {
  require(rho.dim() == model.dim(), "state dimension does not match the model");
  auto p = outcome_probabilities(model, rho.matrix(), a);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-10)
    throw std::runtime_error("outcome probabilities do not sum to one");
  for (auto& v : p) v /= total;
  return Distribution(std::move(p));
}

DensityOperator qomdp_step(const QOMDPModel& model, const DensityOperator& rho, std::size_t a,
                           std::size_t m) {
  require(m < model.n_observations(), "observation index out of range");
  const auto p = outcome_probabilities(model, rho.matrix(), a);
  if (p[m] <= kProbFloor)
    throw std::domain_error("outcome probability below the conditioning floor");
  return conditioned_step(model, rho.matrix(), a, m, p[m]);
}

std::size_t horizon_for_budget(double beta, double cost_bound, double budget) {
  require(beta > 0.0 && beta < 1.0 && budget > 0.0, "invalid truncation parameters");
  if (cost_bound <= 0.0) return 1;
  const double needed = std::log(budget * (1.0 - beta) / cost_bound) / std::log(beta);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::max(0.0, needed))));
}

MonteCarloResult monte_carlo_value(const QOMDPModel& model, const StatePolicy& policy,
                                   const DensityOperator& rho0, std::size_t horizon,
                                   std::size_t n_traj, std::uint64_t seed, std::size_t threads) {
  require(n_traj > 0, "need at least one trajectory");
  require(rho0.dim() == model.dim(), "initial state dimension does not match the model");
  std::vector<double> samples(n_traj);

  auto run = [&](std::size_t begin, std::size_t end) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t k = begin; k < end; ++k) {
      Rng rng = make_stream(seed, k);
      DensityOperator rho = rho0;
      double total = 0.0;
      double discount = 1.0;
      for (std::size_t t = 0; t < horizon; ++t) {
        const std::size_t a = policy(rho);
        total += discount * model.cost(rho, a);
        discount *= model.beta();
        if (t + 1 == horizon) break;
        auto p = outcome_probabilities(model, rho.matrix(), a);
        double mass = 0.0;
        for (auto& v : p) {
          if (v <= kProbFloor) v = 0.0;
          mass += v;
        }
        const double u = unit(rng) * mass;
        std::size_t m = 0;
        double acc = 0.0;
        std::size_t last_valid = 0;
        for (; m < p.size(); ++m) {
          if (p[m] == 0.0) continue;
          last_valid = m;
          acc += p[m];
          if (u < acc) break;
        }
        if (m == p.size()) m = last_valid;
        rho = conditioned_step(model, rho.matrix(), a, m, p[m]);
      }
      samples[k] = total;
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, n_traj));
  if (workers == 1) {
    run(0, n_traj);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_traj + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n_traj, begin + chunk);
      if (begin < end) pool.emplace_back(run, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  MonteCarloResult r;
  r.horizon = horizon;
  r.n_traj = n_traj;
  // Moments taken relative to the first sample.
  const double shift = samples.front();
  double sum = 0.0;
  for (double s : samples) sum += s - shift;
  const double offset = sum / static_cast<double>(n_traj);
  r.mean = shift + offset;
  if (n_traj > 1) {
    double ss = 0.0;
    for (double s : samples) ss += (s - shift - offset) * (s - shift - offset);
    r.std_error = std::sqrt(ss / static_cast<double>(n_traj - 1) / static_cast<double>(n_traj));
  }
  r.truncation_bound =
      std::pow(model.beta(), static_cast<double>(horizon)) * model.cost_bound() / (1.0 - model.beta());
  return r;
}

// ---------------------------------------------------------------------------
// Grids

StateGrid::StateGrid(std::vector<DensityOperator> points, double resolution,
                     GridProvenance provenance)
    : points_(std::move(points)), resolution_(resolution), provenance_(std::move(provenance)) {
  require(!points_.empty(), "grid must not be empty");
  const std::size_t d = points_.front().dim();
  for (const auto& p : points_) require(p.dim() == d, "grid points have different dimensions");
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      require(hs_distance(points_[i], points_[j]) > 1e-12, "grid points are not distinct");
}

std::vector<std::vector<double>> simplex_lattice(std::size_t parts, std::size_t n) {
  require(parts > 0 && n > 0, "lattice needs positive parts and resolution");
  std::set<std::vector<std::pair<std::size_t, std::size_t>>> seen;
  std::vector<std::vector<double>> out;
  for (std::size_t m = 1; m <= n; ++m) {
    std::vector<std::vector<std::size_t>> comps;
    std::vector<std::size_t> cur;
    compositions(m, parts, cur, comps);
    for (const auto& c : comps) {
      std::vector<std::pair<std::size_t, std::size_t>> key;
      std::vector<double> lambda;
      for (std::size_t k : c) {
        const std::size_t g = std::gcd(k, m);
        key.emplace_back(k / g, m / g);
        lambda.push_back(static_cast<double>(k / g) / static_cast<double>(m / g));
      }
      if (seen.insert(key).second) out.push_back(std::move(lambda));
    }
  }
  return out;
}

StateGrid build_state_grid(std::size_t dim, std::size_t n, std::uint64_t seed) {
  require(dim > 0 && n >= 1, "grid needs dim > 0 and n >= 1");
  std::vector<DensityOperator> points;
  auto add = [&points](DensityOperator rho) {
    for (const auto& p : points)
      if (hs_distance(p, rho) <= 1e-12) return;
    points.push_back(std::move(rho));
  };
  for (std::size_t x = 0; x < dim; ++x) add(DensityOperator::basis_state(dim, x));
  add(DensityOperator::maximally_mixed(dim));

  const auto lattice = simplex_lattice(dim, n);
  Rng rng = make_stream(seed, kGridUnitaryTag);
  const std::size_t n_unitaries = n * dim;
  for (std::size_t u = 0; u < n_unitaries; ++u) {
    const Matrix unitary = haar_unitary(dim, rng);
    for (const auto& lambda : lattice) {
      Matrix diag = Matrix::Zero(idx(dim), idx(dim));
      for (std::size_t k = 0; k < dim; ++k) diag(idx(k), idx(k)) = lambda[k];
      add(DensityOperator::from_channel_output(unitary * diag * unitary.adjoint()));
    }
  }
  return StateGrid(std::move(points), 1.0 / static_cast<double>(n),
                   GridProvenance{"basis+mixed+spectral_lattice", dim, n, seed});
}

double estimate_covering_radius(const StateGrid& grid, std::size_t n_samples,
                                std::uint64_t seed) {
  Rng rng = make_stream(seed, kCoverSampleTag);
  double worst = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const DensityOperator rho = (s % 2 == 0)
                                    ? DensityOperator::pure(random_pure_vector(grid.dim(), rng))
                                    : random_density(grid.dim(), rng);
    worst = std::max(worst, hs_distance(rho, grid[nearest_grid_point(rho, grid)]));
  }
  return worst;
}

std::size_t nearest_grid_point(const Matrix& rho, const StateGrid& grid) {
  require(static_cast<std::size_t>(rho.rows()) == grid.dim(), "state dimension does not match the grid");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = (grid[i].matrix() - rho).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::size_t nearest_grid_point(const DensityOperator& rho, const StateGrid& grid) {
  return nearest_grid_point(rho.matrix(), grid);
}

FiniteMDP quantize_cqomdp(const QOMDPModel& model, const StateGrid& grid) {
  require(grid.dim() == model.dim(), "grid dimension does not match the model");
  const std::size_t ns = grid.size();
  const std::size_t na = model.n_actions();
  FiniteMDP::Transitions p(ns, std::vector<std::vector<double>>(na, std::vector<double>(ns, 0.0)));
  FiniteMDP::Costs c(ns, std::vector<double>(na));
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t a = 0; a < na; ++a) {
      c[i][a] = model.cost(grid[i], a);
      const auto probs = outcome_probabilities(model, grid[i].matrix(), a);
      double kept = 0.0;
      for (std::size_t m = 0; m < probs.size(); ++m) {
        if (probs[m] <= kProbFloor) continue;
        const DensityOperator next = conditioned_step(model, grid[i].matrix(), a, m, probs[m]);
        p[i][a][nearest_grid_point(next, grid)] += probs[m];
        kept += probs[m];
      }
      for (auto& v : p[i][a]) v /= kept;
    }
  return FiniteMDP(std::move(p), std::move(c), model.beta());
}

ExtendedPolicy::ExtendedPolicy(std::vector<std::size_t> fn, StateGrid grid)
    : fn_(std::move(fn)), grid_(std::move(grid)) {
  require(fn_.size() == grid_.size(), "policy table must cover every grid point");
}

std::size_t ExtendedPolicy::operator()(const DensityOperator& rho) const {
  return fn_[nearest_grid_point(rho, grid_)];
}

ExtendedPolicy extend_policy(std::vector<std::size_t> fn, const StateGrid& grid) {
  return ExtendedPolicy(std::move(fn), grid);
}

// ---------------------------------------------------------------------------
// Channel nets

NetSources parse_sources(const std::string& list) {
  NetSources s{false, false, false};
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "classical") s.classical = true;
    else if (item == "appending") s.appending = true;
    else if (item == "closed_loop") s.closed_loop = true;
    else if (!item.empty()) throw std::invalid_argument("unknown net source: " + item);
  }
  return s;
}

std::string to_string(const NetSources& sources) {
  std::string out;
  auto add = [&out](const char* name) {
    if (!out.empty()) out += ",";
    out += name;
  };
  if (sources.classical) add("classical");
  if (sources.appending) add("appending");
  if (sources.closed_loop) add("closed_loop");
  return out;
}

StateGrid build_xi_grid(std::size_t dim_a, std::size_t n, std::uint64_t seed) {
  return build_state_grid(dim_a, n, seed ^ kXiSeedMix);
}

ChannelNet::ChannelNet(std::vector<KrausChannel> channels, std::vector<std::string> labels,
                       NetProvenance provenance)
    : channels_(std::move(channels)), labels_(std::move(labels)), provenance_(provenance) {
  require(channels_.size() == labels_.size(), "one label per channel");
  for (const auto& ch : channels_)
    require(ch.in_dim() == channels_.front().in_dim() && ch.out_dim() == channels_.front().out_dim(),
            "net channels have different dimensions");
}

ChannelNet build_channel_net(std::size_t dim_x, std::size_t dim_a, std::size_t n,
                             std::uint64_t seed, NetSources sources,
                             std::vector<KrausChannel> user) {
  require(dim_x > 0 && dim_a > 0 && n >= 1, "net needs positive dimensions and n >= 1");
  std::vector<KrausChannel> channels;
  std::vector<std::string> labels;

  if (sources.classical) {
    const auto rows = simplex_lattice(dim_a, n);
    double count = std::pow(static_cast<double>(rows.size()), static_cast<double>(dim_x));
    if (count > static_cast<double>(kMaxClassicalKernels))
      throw std::length_error("classical kernel lattice too large for this resolution");
    // Rows [0, dim_a) are the vertices; tuples using only vertices come first.
    auto emit = [&](const std::vector<std::size_t>& choice) {
      std::vector<std::vector<double>> kernel;
      std::string label = "classical:";
      for (std::size_t x = 0; x < dim_x; ++x) {
        kernel.push_back(rows[choice[x]]);
        label += (x ? "," : "") + std::to_string(choice[x]);
      }
      channels.push_back(embed_classical_policy(StochasticKernel(std::move(kernel))));
      labels.push_back(std::move(label));
    };
    auto enumerate = [&](std::size_t radix, bool need_interior) {
      std::vector<std::size_t> choice(dim_x, 0);
      while (true) {
        const bool interior =
            std::any_of(choice.begin(), choice.end(), [&](std::size_t r) { return r >= dim_a; });
        if (interior == need_interior) emit(choice);
        std::size_t pos = dim_x;
        while (pos > 0) {
          --pos;
          if (++choice[pos] < radix) break;
          choice[pos] = 0;
          if (pos == 0) return;
        }
      }
    };
    enumerate(dim_a, false);
    if (rows.size() > dim_a) enumerate(rows.size(), true);
  }

  if (sources.appending) {
    const StateGrid xi_grid = build_xi_grid(dim_a, n, seed);
    for (std::size_t i = 0; i < xi_grid.size(); ++i) {
      channels.push_back(open_loop_channel(xi_grid[i], dim_x));
      labels.push_back("appending:" + std::to_string(i));
    }
  }

  if (sources.closed_loop) {
    Rng rng = make_stream(seed, kPhiTag);
    for (std::size_t k = 0; k < 2 * n; ++k) {
      channels.push_back(closed_loop_channel(random_phi_family(dim_x, dim_a, dim_x * dim_a, rng)));
      labels.push_back("closed_loop:" + std::to_string(k));
    }
  }

  const std::size_t n_user = user.size();
  for (std::size_t k = 0; k < n_user; ++k) {
    require(user[k].in_dim() == dim_x && user[k].out_dim() == dim_x * dim_a,
            "user channel has the wrong dimensions");
    channels.push_back(std::move(user[k]));
    labels.push_back("user:" + std::to_string(k));
  }
  require(!channels.empty(), "channel net is empty");
  return ChannelNet(std::move(channels), std::move(labels),
                    NetProvenance{dim_x, dim_a, n, seed, sources, n_user});
}

QOMDPModel build_finite_action_qmdp(const KrausChannel& transition,
                                    const HermitianObservable& cost, double beta,
                                    const ChannelNet& net) {
  require(net.size() > 0, "channel net is empty");
  const std::size_t dim_x = transition.out_dim();
  require(net[0].in_dim() == dim_x && net[0].out_dim() == transition.in_dim(),
          "net channels do not match the transition channel");
  require(cost.dim() == transition.in_dim(), "cost does not match the transition channel");
  std::vector<std::string> actions;
  std::vector<KrausChannel> divisible, indivisible;
  std::vector<HermitianObservable> costs;
  for (std::size_t k = 0; k < net.size(); ++k) {
    actions.push_back(net.labels()[k]);
    divisible.push_back(identity_channel(dim_x));
    indivisible.push_back(compose(transition, net[k]));
    Matrix pulled = net[k].adjoint_apply(cost.matrix());
    pulled = 0.5 * (pulled + pulled.adjoint()).eval();
    costs.emplace_back(std::move(pulled));
  }
  return QOMDPModel(dim_x, std::move(actions), {"none"}, std::move(divisible),
                    std::move(indivisible), std::move(costs), beta);
}

QOMDPModel build_finite_action_qmdp(const EmbeddedModel& model, const ChannelNet& net) {
  return build_finite_action_qmdp(model.transition, model.cost, model.source.beta(), net);
}

}  // namespace qmdp
