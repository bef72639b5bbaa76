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
#include <set>

#include "qmdp/approximation.hpp"
#include "qmdp/policies.hpp"
#include "qmdp/serialization.hpp"

using namespace qmdp;

namespace {

Matrix projector(std::size_t dim, std::size_t i) { return matrix_unit(dim, i, i); }

/// Qubit model: action 0 measures in the computational basis, action 1 does
/// nothing. Cost of action a is diag(a_cost0, a_cost1).
QOMDPModel measurement_model(double beta) {
  const KrausChannel measure(2, 2, {projector(2, 0), projector(2, 1)});
  Matrix c0 = Matrix::Zero(2, 2);
  c0(0, 0) = 0.2;
  c0(1, 1) = 1.0;
  Matrix c1 = Matrix::Zero(2, 2);
  c1(0, 0) = 0.6;
  c1(1, 1) = 0.4;
  return QOMDPModel(2, {"measure", "wait"}, {}, {measure, identity_channel(2)},
                    {identity_channel(2), identity_channel(2)},
                    {HermitianObservable(c0), HermitianObservable(c1)}, beta);
}

}  // namespace

TEST_CASE("outcome distribution") {
  const QOMDPModel model = measurement_model(0.9);
  CHECK(model.n_observations() == 2);
  const double diag_p[] = {0.3, 0.7};
  const Distribution d = outcome_distribution(model, DensityOperator::diagonal(diag_p), 0);
  CHECK(d[0] == doctest::Approx(0.3));
  CHECK(d[1] == doctest::Approx(0.7));

  Rng rng = make_stream(51, 0);
  const Distribution id = outcome_distribution(model, random_density(2, rng), 1);
  CHECK(id[0] == 1.0);
  CHECK(id[1] == 0.0);
}

TEST_CASE("qomdp step") {
  const QOMDPModel model = measurement_model(0.9);
  Rng rng = make_stream(52, 0);
  const DensityOperator rho = random_density(2, rng);
  CHECK(hs_distance(qomdp_step(model, rho, 1, 0), rho) < 1e-15);
  CHECK(hs_distance(qomdp_step(model, rho, 0, 1), DensityOperator::basis_state(2, 1)) < 1e-12);
  CHECK_THROWS_AS(qomdp_step(model, rho, 1, 1), std::domain_error);

  const DensityOperator pure = DensityOperator::pure(random_pure_vector(2, rng));
  const DensityOperator out = qomdp_step(model, pure, 0, 0);
  CHECK(validate_density(out.matrix()).ok);
}

TEST_CASE("monte carlo value") {
  const QOMDPModel model = measurement_model(0.9);
  const StatePolicy wait = [](const DensityOperator&) -> std::size_t { return 1; };
  const DensityOperator zero = DensityOperator::basis_state(2, 0);
  const MonteCarloResult det = monte_carlo_value(model, wait, zero, 100, 50, 7);
  CHECK(det.std_error == 0.0);
  CHECK(det.mean == doctest::Approx(0.6 * (1 - std::pow(0.9, 100)) / 0.1).epsilon(1e-12));

  const QOMDPModel free(2, {"a"}, {}, {identity_channel(2)}, {identity_channel(2)},
                        {HermitianObservable(Matrix::Zero(2, 2))}, 0.9);
  const StatePolicy only = [](const DensityOperator&) -> std::size_t { return 0; };
  CHECK(monte_carlo_value(free, only, zero, 50, 20, 1).mean == 0.0);

  // Coin: measure |+> each step, constant cost 1.
  const QOMDPModel coin(2, {"flip"}, {}, {KrausChannel(2, 2, {projector(2, 0), projector(2, 1)})},
                        {unitary_channel((Matrix(2, 2) << 1, 1, 1, -1).finished() / std::sqrt(2.0))},
                        {HermitianObservable::identity(2)}, 0.9);
  const std::size_t horizon = horizon_for_budget(0.9, 1.0, 1e-4);
  const MonteCarloResult r = monte_carlo_value(coin, only, zero, horizon, 2000, 3);
  CHECK(std::abs(r.mean - 10.0) <= r.truncation_bound + 3 * r.std_error + 1e-12);
  CHECK(r.truncation_bound <= 1e-4);

  const MonteCarloResult serial = monte_carlo_value(coin, only, DensityOperator::maximally_mixed(2), 40, 300, 9, 1);
  const MonteCarloResult threaded = monte_carlo_value(coin, only, DensityOperator::maximally_mixed(2), 40, 300, 9, 4);
  CHECK(serial.mean == threaded.mean);
  CHECK(serial.std_error == threaded.std_error);
}

TEST_CASE("state grid") {
  const StateGrid g1 = build_state_grid(2, 1, 5);
  auto contains = [](const StateGrid& g, const DensityOperator& rho) {
    for (const auto& p : g.points())
      if (hs_distance(p, rho) < 1e-14) return true;
    return false;
  };
  CHECK(contains(g1, DensityOperator::basis_state(2, 0)));
  CHECK(contains(g1, DensityOperator::basis_state(2, 1)));
  CHECK(contains(g1, DensityOperator::maximally_mixed(2)));

  const StateGrid g4 = build_state_grid(2, 4, 5);
  for (const auto& p : g4.points()) CHECK(validate_density(p.matrix()).ok);

  const StateGrid g2 = build_state_grid(2, 2, 5);
  for (const auto& p : g2.points()) CHECK(contains(g4, p));

  const double r2 = estimate_covering_radius(g2, 10000, 99);
  const double r4 = estimate_covering_radius(g4, 10000, 99);
  const double r8 = estimate_covering_radius(build_state_grid(2, 8, 5), 10000, 99);
  CHECK(r4 <= r2);
  CHECK(r8 <= r4);
}

TEST_CASE("nearest grid point") {
  const GridProvenance prov{"manual", 2, 1, 0};
  const StateGrid grid({DensityOperator::basis_state(2, 0), DensityOperator::basis_state(2, 1),
                        DensityOperator::maximally_mixed(2)},
                       1.0, prov);
  CHECK(nearest_grid_point(DensityOperator::basis_state(2, 1), grid) == 1);
  const double w[] = {0.6, 0.4};
  CHECK(nearest_grid_point(DensityOperator::diagonal(w), grid) == 2);

  const StateGrid pair({DensityOperator::basis_state(2, 0), DensityOperator::basis_state(2, 1)}, 1.0, prov);
  CHECK(nearest_grid_point(DensityOperator::maximally_mixed(2), pair) == 0);
  CHECK_THROWS_AS(StateGrid({DensityOperator::basis_state(2, 0), DensityOperator::basis_state(2, 0)}, 1.0, prov),
                  std::invalid_argument);
}

TEST_CASE("quantize cqomdp") {
  const GridProvenance prov{"manual", 2, 1, 0};
  const StateGrid grid({DensityOperator::basis_state(2, 0), DensityOperator::basis_state(2, 1),
                        DensityOperator::maximally_mixed(2)},
                       1.0, prov);
  const QOMDPModel model = measurement_model(0.9);
  const FiniteMDP q = quantize_cqomdp(model, grid);
  REQUIRE(q.n_states() == 3);
  // Measuring I/2 lands on each basis state with probability 1/2.
  CHECK(q.p(0, 2, 0) == doctest::Approx(0.5));
  CHECK(q.p(1, 2, 0) == doctest::Approx(0.5));
  CHECK(q.p(2, 2, 0) == 0.0);
  // Waiting keeps every grid point, so the dynamics are deterministic.
  for (std::size_t i = 0; i < 3; ++i) CHECK(q.p(i, i, 1) == 1.0);
  CHECK(q.c(2, 0) == doctest::Approx(0.6));
  CHECK(q.c(0, 1) == doctest::Approx(0.6));

  const StateGrid single({DensityOperator::maximally_mixed(2)}, 1.0, prov);
  const FiniteMDP one = quantize_cqomdp(model, single);
  CHECK(one.n_states() == 1);
  CHECK(one.c(0, 1) == doctest::Approx(model.cost(DensityOperator::maximally_mixed(2), 1)));

  const FiniteMDP fine = quantize_cqomdp(model, build_state_grid(2, 3, 4));
  for (std::size_t i = 0; i < fine.n_states(); ++i)
    for (std::size_t a = 0; a < 2; ++a) {
      double s = 0.0;
      for (double p : fine.next_distribution(i, a)) s += p;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("extend policy") {
  const StateGrid grid = build_state_grid(2, 2, 3);
  std::vector<std::size_t> fn(grid.size());
  for (std::size_t i = 0; i < fn.size(); ++i) fn[i] = i % 2;
  const ExtendedPolicy pol = extend_policy(fn, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(pol(grid[i]) == fn[i]);

  const ExtendedPolicy constant = extend_policy(std::vector<std::size_t>(grid.size(), 1), grid);
  Rng rng = make_stream(53, 0);
  for (int k = 0; k < 10; ++k) CHECK(constant(random_density(2, rng)) == 1);

  const StateGrid pair({DensityOperator::basis_state(2, 0), DensityOperator::basis_state(2, 1)}, 1.0,
                       GridProvenance{"manual", 2, 1, 0});
  CHECK(extend_policy({7, 3}, pair)(DensityOperator::maximally_mixed(2)) == 7);
}

TEST_CASE("channel net") {
  const ChannelNet classical = build_channel_net(2, 2, 1, 3, parse_sources("classical"));
  CHECK(classical.size() == 4);
  for (const auto& ch : classical.channels()) {
    CHECK(validate_channel(ch).ok());
    CHECK(classify_policy(ch) == PolicyKind::classical);
  }

  const ChannelNet full = build_channel_net(2, 2, 3, 3, NetSources{});
  for (const auto& ch : full.channels()) CHECK(validate_channel(ch).ok());

  const ChannelNet net2 = build_channel_net(2, 2, 2, 8, NetSources{});
  const ChannelNet net4 = build_channel_net(2, 2, 4, 8, NetSources{});
  std::set<std::string> coarse;
  for (const auto& ch : net2.channels()) coarse.insert(to_json(ch).dump());
  std::set<std::string> fine;
  for (const auto& ch : net4.channels()) fine.insert(to_json(ch).dump());
  for (const auto& s : coarse) CHECK(fine.count(s) == 1);

  CHECK(to_string(parse_sources("appending,closed_loop")) == "appending,closed_loop");
  CHECK_THROWS_AS(parse_sources("bogus"), std::invalid_argument);
}

TEST_CASE("finite action qmdp") {
  Rng rng = make_stream(54, 0);
  const EmbeddedModel model = embed_model(random_finite_mdp(2, 2, 0.9, rng));
  const ChannelNet net = build_channel_net(2, 2, 2, 11, NetSources{});
  const QOMDPModel q = build_finite_action_qmdp(model, net);
  CHECK(q.n_actions() == net.size());
  for (int k = 0; k < 5; ++k) {
    const DensityOperator rho = random_density(2, rng);
    for (std::size_t a = 0; a < net.size(); a += 3) {
      CHECK(q.cost(rho, a) ==
            doctest::Approx(hs_inner(model.cost, apply_channel(net[a], rho))).epsilon(1e-12));
      const Distribution d = outcome_distribution(q, rho, a);
      CHECK(d[0] == doctest::Approx(1.0));
    }
  }

  const ChannelNet one({net[0]}, {"only"}, net.provenance());
  const QOMDPModel single = build_finite_action_qmdp(model, one);
  const StatePolicy only = [](const DensityOperator&) -> std::size_t { return 0; };
  const DensityOperator rho0 = DensityOperator::basis_state(2, 1);
  const MonteCarloResult mc = monte_carlo_value(single, only, rho0, 200, 3, 1);
  CHECK(mc.std_error == 0.0);
  DensityOperator rho = rho0;
  double expected = 0.0;
  double disc = 1.0;
  for (int t = 0; t < 200; ++t) {
    expected += disc * hs_inner(model.cost, apply_channel(net[0], rho));
    rho = apply_channel(model.transition, apply_channel(net[0], rho));
    disc *= 0.9;
  }
  CHECK(mc.mean == doctest::Approx(expected).epsilon(1e-12));
}
