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


#include "qmdp/serialization.hpp"

#include <stdexcept>

namespace qmdp {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

Json sources_to_json(const NetSources& s) { return to_string(s); }

}  // namespace

Json to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  require(j.is_array() && j.size() == 2, "complex scalar must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  require(j.is_array() && !j.empty() && j[0].is_array(), "matrix must be a nested array");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Matrix m(idx(rows), idx(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    require(j[i].is_array() && j[i].size() == cols, "matrix rows have different lengths");
    for (std::size_t k = 0; k < cols; ++k) m(idx(i), idx(k)) = complex_from_json(j[i][k]);
  }
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

Vector vector_from_json(const Json& j) {
  require(j.is_array() && !j.empty(), "vector must be a non-empty array");
  Vector v(idx(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(idx(i)) = complex_from_json(j[i]);
  return v;
}

Json to_json(const DensityOperator& rho) {
  return Json{{"dim", rho.dim()}, {"matrix", matrix_to_json(rho.matrix())}};
}

DensityOperator density_from_json(const Json& j, const Tolerances& tol) {
  Matrix m = matrix_from_json(j.at("matrix"));
  require(static_cast<std::size_t>(m.rows()) == j.at("dim").get<std::size_t>(),
          "density operator dim does not match its matrix");
  return DensityOperator(std::move(m), tol);
}

Json to_json(const KrausChannel& ch) {
  Json kraus = Json::array();
  for (const auto& k : ch.kraus()) kraus.push_back(matrix_to_json(k));
  return Json{{"in_dim", ch.in_dim()}, {"out_dim", ch.out_dim()}, {"kraus", std::move(kraus)}};
}

KrausChannel channel_from_json(const Json& j) {
  std::vector<Matrix> kraus;
  for (const auto& k : j.at("kraus")) kraus.push_back(matrix_from_json(k));
  return KrausChannel(j.at("in_dim").get<std::size_t>(), j.at("out_dim").get<std::size_t>(),
                      std::move(kraus));
}

Json to_json(const FiniteMDP& mdp) {
  return Json{{"n_states", mdp.n_states()},
              {"n_actions", mdp.n_actions()},
              {"p", mdp.transitions()},
              {"c", mdp.costs()},
              {"beta", mdp.beta()}};
}

FiniteMDP mdp_from_json(const Json& j) {
  auto p = j.at("p").get<FiniteMDP::Transitions>();
  auto c = j.at("c").get<FiniteMDP::Costs>();
  FiniteMDP mdp(std::move(p), std::move(c), j.at("beta").get<double>());
  if (j.contains("n_states"))
    require(j["n_states"].get<std::size_t>() == mdp.n_states(), "n_states does not match p");
  if (j.contains("n_actions"))
    require(j["n_actions"].get<std::size_t>() == mdp.n_actions(), "n_actions does not match p");
  return mdp;
}

Json to_json(const StochasticKernel& pi) {
  Json rows = Json::array();
  for (std::size_t x = 0; x < pi.n_states(); ++x) {
    const auto r = pi.row(x);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

StochasticKernel kernel_from_json(const Json& j) {
  return StochasticKernel(j.get<std::vector<std::vector<double>>>());
}

Json to_json(const PhiFamily& phi) {
  return Json{{"dim_x", phi.dim_x()},
              {"dim_a", phi.dim_a()},
              {"dim_l", phi.dim_l()},
              {"vectors", matrix_to_json(phi.vectors())}};
}

PhiFamily phi_from_json(const Json& j) {
  Matrix v = matrix_from_json(j.at("vectors"));
  if (j.contains("dim_l"))
    require(static_cast<std::size_t>(v.cols()) == j["dim_l"].get<std::size_t>(),
            "dim_l does not match the vectors");
  return PhiFamily(j.at("dim_x").get<std::size_t>(), j.at("dim_a").get<std::size_t>(),
                   std::move(v));
}

Json policy_to_json(PolicyKind kind, const Json& tail_payload, const std::vector<Json>& sequence) {
  return Json{{"kind", to_string(kind)},
              {"payload", tail_payload},
              {"stationary", sequence.empty()},
              {"sequence", sequence}};
}

namespace {

KrausChannel channel_from_payload(PolicyKind kind, const Json& payload) {
  switch (kind) {
    case PolicyKind::classical:
      return embed_classical_policy(kernel_from_json(payload));
    case PolicyKind::open_loop:
      return open_loop_channel(density_from_json(payload.at("xi")),
                               payload.at("dim_x").get<std::size_t>());
    case PolicyKind::closed_loop:
      return closed_loop_channel(phi_from_json(payload));
    case PolicyKind::general:
      break;
  }
  return channel_from_json(payload);
}

}  // namespace

MarkovQuantumPolicy policy_from_json(const Json& j) {
  const PolicyKind kind = policy_kind_from_string(j.at("kind").get<std::string>());
  std::vector<KrausChannel> prefix;
  if (j.contains("sequence"))
    for (const auto& step : j["sequence"]) prefix.push_back(channel_from_payload(kind, step));
  if (j.value("stationary", prefix.empty()) && !prefix.empty())
    throw std::invalid_argument("stationary policy must not carry a sequence");
  return MarkovQuantumPolicy(std::move(prefix), channel_from_payload(kind, j.at("payload")), kind);
}

Json to_json(const QOMDPModel& model) {
  Json div = Json::object();
  Json indiv = Json::object();
  Json cost = Json::object();
  for (std::size_t a = 0; a < model.n_actions(); ++a) {
    const auto& name = model.action_names()[a];
    div[name] = to_json(model.divisible(a));
    indiv[name] = to_json(model.indivisible(a));
    cost[name] = matrix_to_json(model.cost_observable(a).matrix());
  }
  return Json{{"dim", model.dim()},
              {"actions", model.action_names()},
              {"observations", model.observation_names()},
              {"divisible", std::move(div)},
              {"indivisible", std::move(indiv)},
              {"cost", std::move(cost)},
              {"beta", model.beta()}};
}

QOMDPModel qomdp_from_json(const Json& j) {
  const auto actions = j.at("actions").get<std::vector<std::string>>();
  std::vector<KrausChannel> div, indiv;
  std::vector<HermitianObservable> costs;
  for (const auto& name : actions) {
    div.push_back(channel_from_json(j.at("divisible").at(name)));
    indiv.push_back(channel_from_json(j.at("indivisible").at(name)));
    costs.emplace_back(matrix_from_json(j.at("cost").at(name)));
  }
  return QOMDPModel(j.at("dim").get<std::size_t>(), actions,
                    j.value("observations", std::vector<std::string>{}), std::move(div),
                    std::move(indiv), std::move(costs), j.at("beta").get<double>());
}

Json to_json(const GridProvenance& p) {
  return Json{{"construction", p.construction}, {"dim", p.dim}, {"n", p.n}, {"seed", p.seed}};
}

Json to_json(const NetProvenance& p) {
  return Json{{"construction", "structured_nested"},
              {"dim_x", p.dim_x},
              {"dim_a", p.dim_a},
              {"n", p.n},
              {"seed", p.seed},
              {"sources", sources_to_json(p.sources)},
              {"user_channels", p.user_channels}};
}

Json to_json(const StateGrid& grid) {
  Json points = Json::array();
  for (const auto& p : grid.points()) points.push_back(to_json(p));
  return Json{{"provenance", to_json(grid.provenance())},
              {"resolution", grid.resolution()},
              {"points", std::move(points)}};
}

StateGrid grid_from_json(const Json& j) {
  std::vector<DensityOperator> points;
  for (const auto& p : j.at("points")) points.push_back(density_from_json(p));
  const auto& prov = j.at("provenance");
  return StateGrid(std::move(points), j.at("resolution").get<double>(),
                   GridProvenance{prov.at("construction").get<std::string>(),
                                  prov.at("dim").get<std::size_t>(),
                                  prov.at("n").get<std::size_t>(),
                                  prov.at("seed").get<std::uint64_t>()});
}

Json to_json(const ChannelNet& net) {
  Json channels = Json::array();
  for (const auto& ch : net.channels()) channels.push_back(to_json(ch));
  return Json{{"provenance", to_json(net.provenance())},
              {"labels", net.labels()},
              {"channels", std::move(channels)}};
}

ChannelNet net_from_json(const Json& j) {
  std::vector<KrausChannel> channels;
  for (const auto& ch : j.at("channels")) channels.push_back(channel_from_json(ch));
  const auto& prov = j.at("provenance");
  NetProvenance p{prov.at("dim_x").get<std::size_t>(),
                  prov.at("dim_a").get<std::size_t>(),
                  prov.at("n").get<std::size_t>(),
                  prov.at("seed").get<std::uint64_t>(),
                  parse_sources(prov.at("sources").get<std::string>()),
                  prov.value("user_channels", std::size_t{0})};
  return ChannelNet(std::move(channels), j.at("labels").get<std::vector<std::string>>(), p);
}

Json to_json(const EmbeddedModel& model) {
  return Json{{"kind", "embedded_model"},
              {"basis", "computational; |x,a> has index x * dim_a + a"},
              {"dim_x", model.dim_x},
              {"dim_a", model.dim_a},
              {"beta", model.source.beta()},
              {"source", to_json(model.source)},
              {"transition_channel", to_json(model.transition)},
              {"cost", matrix_to_json(model.cost.matrix())}};
}

EmbeddedModel embedded_model_from_json(const Json& j) {
  FiniteMDP source = mdp_from_json(j.at("source"));
  KrausChannel transition = channel_from_json(j.at("transition_channel"));
  HermitianObservable cost(matrix_from_json(j.at("cost")));
  const std::size_t dim_x = j.at("dim_x").get<std::size_t>();
  const std::size_t dim_a = j.at("dim_a").get<std::size_t>();
  require(dim_x == source.n_states() && dim_a == source.n_actions(),
          "embedded model dimensions do not match its source model");
  require(transition.in_dim() == dim_x * dim_a && transition.out_dim() == dim_x,
          "transition channel has the wrong dimensions");
  require(cost.dim() == dim_x * dim_a, "cost has the wrong dimension");
  return EmbeddedModel{std::move(source), dim_x, dim_a, std::move(transition), std::move(cost)};
}

}  // namespace qmdp
