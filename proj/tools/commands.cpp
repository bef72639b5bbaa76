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


#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "qmdp/approximation.hpp"
#include "qmdp/classical_mdp.hpp"
#include "qmdp/embedding.hpp"
#include "qmdp/serialization.hpp"
#include "qmdp/solver.hpp"

namespace qmdp::cli {

namespace {

/// Input could not be read or does not have the expected structure.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string output;
  std::optional<std::uint64_t> seed;
  double eps = 1e-6;
  std::optional<double> beta_override;
  std::vector<std::size_t> n{2};
  std::optional<std::size_t> horizon;
  std::size_t traj = 10000;
  std::size_t threads = 1;
  std::size_t max_iters = 100000;
  std::string sources = "classical,appending,closed_loop";
  std::string lookup = "basis_mixture";
  std::size_t dim_x = 2;
  std::size_t dim_a = 2;
  std::string target = "1,0";
  std::string initial;
  std::string povm;
};

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_report(const Json& report, const std::string& path, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path);
  file << text;
}

std::uint64_t require_seed(const Options& o) {
  if (!o.seed) throw ParseError("--seed is required for randomized constructions");
  return *o.seed;
}

Vector parse_amplitudes(const std::string& text) {
  std::vector<Complex> amps;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    try {
      if (colon == std::string::npos) {
        amps.emplace_back(std::stod(item), 0.0);
      } else {
        amps.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
      }
    } catch (const std::logic_error&) {
      throw ParseError("cannot parse amplitude '" + item + "'");
    }
  }
  if (amps.empty()) throw ParseError("empty amplitude list");
  Vector v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps[i];
  return v;
}

FiniteMDP with_beta(const FiniteMDP& mdp, const std::optional<double>& beta) {
  if (!beta) return mdp;
  return FiniteMDP(mdp.transitions(), mdp.costs(), *beta);
}

Json json_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// ---------------------------------------------------------------------------
// validate

void validate_walk(const Json& node, const std::string& path, Json& objects) {
  if (node.is_object()) {
    if (node.contains("kraus")) {
      KrausChannel ch = [&] {
        try {
          return channel_from_json(node);
        } catch (const std::exception& e) {
          throw ParseError(path + ": " + e.what());
        }
      }();
      const auto r = validate_channel(ch);
      objects.push_back(Json{{"path", path},
                             {"kind", "channel"},
                             {"in_dim", ch.in_dim()},
                             {"out_dim", ch.out_dim()},
                             {"completeness_residual", r.completeness_residual},
                             {"completeness_residual_normalized",
                              r.completeness_residual / std::sqrt(double(ch.in_dim()))},
                             {"choi_min_eigenvalue", r.choi_min_eigenvalue},
                             {"trace_preserving", r.trace_preserving},
                             {"completely_positive", r.completely_positive},
                             {"passed", r.ok()}});
      return;
    }
    if (node.contains("matrix") && node.contains("dim")) {
      Matrix m;
      try {
        m = matrix_from_json(node.at("matrix"));
      } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
      }
      const auto r = validate_density(m);
      const bool dim_ok = node.at("dim").is_number_unsigned() &&
                          node.at("dim").get<std::size_t>() == static_cast<std::size_t>(m.rows());
      objects.push_back(Json{{"path", path},
                             {"kind", "density_operator"},
                             {"dim", m.rows()},
                             {"hermitian_residual", r.hermitian_residual},
                             {"trace_error", r.trace_error},
                             {"min_eigenvalue", r.min_eigenvalue},
                             {"passed", r.ok && dim_ok}});
      return;
    }
    if (node.contains("p") && node.contains("c") && node.contains("beta")) {
      Json entry{{"path", path}, {"kind", "finite_mdp"}};
      try {
        mdp_from_json(node);
        entry["passed"] = true;
      } catch (const std::invalid_argument& e) {
        entry["passed"] = false;
        entry["error"] = e.what();
      } catch (const Json::exception& e) {
        throw ParseError(path + ": " + e.what());
      }
      objects.push_back(std::move(entry));
      return;
    }
    for (const auto& [key, value] : node.items()) validate_walk(value, path + "/" + key, objects);
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i)
      validate_walk(node[i], path + "/" + std::to_string(i), objects);
  }
}

int cmd_validate(const Options& o, std::ostream& out) {
  const Json doc = read_json(o.input);
  Json objects = Json::array();
  validate_walk(doc, "", objects);
  if (objects.empty()) throw ParseError("no channels, density operators or models found");
  bool all = true;
  for (const auto& obj : objects) all = all && obj.at("passed").get<bool>();
  const Json report{{"input", o.input}, {"objects", objects}, {"passed", all}};
  write_report(report, o.output, out);
  if (!o.output.empty())
    for (const auto& obj : objects)
      out << (obj["passed"].get<bool>() ? "PASS " : "FAIL ") << obj["kind"].get<std::string>()
          << " " << (obj["path"].get<std::string>().empty() ? "/" : obj["path"].get<std::string>())
          << "\n";
  return all ? kOk : kValidationFailed;
}

// ---------------------------------------------------------------------------
// solve-classical / embed

int cmd_solve_classical(const Options& o, std::ostream& out) {
  const FiniteMDP mdp = with_beta(mdp_from_json(read_json(o.input)), o.beta_override);
  const ClassicalSolution sol = value_iteration(mdp, o.eps);
  const Json report{{"values", sol.values},
                    {"policy", sol.policy},
                    {"iters", sol.iterations},
                    {"residual", sol.residual},
                    {"config", {{"eps", o.eps}, {"beta", mdp.beta()}}}};
  write_report(report, o.output, out);
  if (!o.output.empty())
    for (std::size_t x = 0; x < sol.values.size(); ++x)
      out << "x=" << x << "  J*=" << std::setprecision(12) << report["values"][x].get<double>()
          << "  a*=" << sol.policy[x] << "\n";
  return kOk;
}

int cmd_embed(const Options& o, std::ostream& out) {
  const FiniteMDP mdp = with_beta(mdp_from_json(read_json(o.input)), o.beta_override);
  const EmbeddedModel model = embed_model(mdp);
  const auto r = validate_channel(model.transition);
  Json doc = to_json(model);
  doc["transition_validation"] = {{"completeness_residual", r.completeness_residual},
                                  {"choi_min_eigenvalue", r.choi_min_eigenvalue}};
  write_report(doc, o.output, out);
  if (!o.output.empty())
    out << "embedded " << model.dim_x << "x" << model.dim_a << " model, "
        << model.transition.kraus().size() << " Kraus operators, completeness residual "
        << r.completeness_residual << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// solve-qmdp

SolverConfig solver_config(const Options& o, double beta) {
  SolverConfig c;
  c.beta = beta;
  c.eps = o.eps;
  c.max_iters = o.max_iters;
  c.horizon_for_rollout = o.horizon.value_or(200);
  c.continuation = continuation_from_string(o.lookup);
  c.threads = o.threads;
  return c;
}

Json config_json(const SolverConfig& c, const Options& o, std::size_t n, std::uint64_t seed) {
  return Json{{"beta", c.beta},
              {"eps", c.eps},
              {"max_iters", c.max_iters},
              {"continuation", to_string(c.continuation)},
              {"horizon", c.horizon_for_rollout},
              {"n", n},
              {"seed", seed},
              {"sources", o.sources}};
}

int cmd_solve_qmdp(const Options& o, std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = require_seed(o);
  if (o.n.size() != 1) throw ParseError("solve-qmdp takes a single --n");
  const std::size_t n = o.n.front();
  EmbeddedModel model = embedded_model_from_json(read_json(o.input));
  if (o.beta_override) model.source = with_beta(model.source, o.beta_override);
  const SolverConfig config = solver_config(o, model.source.beta());

  const StateGrid grid = build_state_grid(model.dim_x, n, seed);
  const ChannelNet net = build_channel_net(model.dim_x, model.dim_a, n, seed, parse_sources(o.sources));
  const GridBellman op(grid, net, model.transition, model.cost, config.continuation, config.threads);
  const ValueIterationResult sol = value_iterate(config, op);

  Json basis_values = Json::array();
  for (std::size_t x = 0; x < model.dim_x; ++x)
    basis_values.push_back(sol.v.values[nearest_grid_point(DensityOperator::basis_state(model.dim_x, x), grid)]);
  Json policy_labels = Json::array();
  for (std::size_t k : sol.policy.indices) policy_labels.push_back(net.labels()[k]);

  const Json report{{"grid_values", sol.v.values},
                    {"policy_indices", sol.policy.indices},
                    {"policy_labels", policy_labels},
                    {"basis_state_values", basis_values},
                    {"iters", sol.iters},
                    {"residual", sol.residual},
                    {"converged", sol.converged},
                    {"grid_size", grid.size()},
                    {"net_size", net.size()},
                    {"config", config_json(config, o, n, seed)},
                    {"net_provenance", to_json(net.provenance())},
                    {"grid_provenance", to_json(grid.provenance())}};
  write_report(report, o.output, out);
  if (!o.output.empty()) {
    out << "grid " << grid.size() << " points, net " << net.size() << " channels, "
        << sol.iters << " sweeps, residual " << sol.residual << "\n";
    for (std::size_t x = 0; x < model.dim_x; ++x)
      out << "V(|" << x << "><" << x << "|) = " << std::setprecision(12)
          << report["basis_state_values"][x].get<double>() << "\n";
  }
  if (!sol.converged) {
    err << "value iteration did not converge, residual " << sol.residual << "\n";
    return kNotConverged;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// solve-qomdp

int cmd_solve_qomdp(const Options& o, std::ostream& out) {
  const std::uint64_t seed = require_seed(o);
  const Json doc = read_json(o.input);
  const QOMDPModel model = [&] {
    QOMDPModel m = qomdp_from_json(doc);
    if (!o.beta_override) return m;
    std::vector<KrausChannel> div, indiv;
    std::vector<HermitianObservable> costs;
    for (std::size_t a = 0; a < m.n_actions(); ++a) {
      div.push_back(m.divisible(a));
      indiv.push_back(m.indivisible(a));
      costs.push_back(m.cost_observable(a));
    }
    return QOMDPModel(m.dim(), m.action_names(), m.observation_names(), std::move(div),
                      std::move(indiv), std::move(costs), *o.beta_override);
  }();
  const DensityOperator rho0 = doc.contains("rho0") ? density_from_json(doc["rho0"])
                                                    : DensityOperator::maximally_mixed(model.dim());
  const std::size_t horizon =
      o.horizon.value_or(horizon_for_budget(model.beta(), model.cost_bound(), 1e-4));

  std::vector<std::size_t> ns = o.n;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  Json runs = Json::array();
  std::vector<MonteCarloResult> mc;
  for (std::size_t n : ns) {
    const StateGrid grid = build_state_grid(model.dim(), n, seed);
    const FiniteMDP finite = quantize_cqomdp(model, grid);
    const ClassicalSolution sol = value_iteration(finite, o.eps);
    const ExtendedPolicy policy = extend_policy(sol.policy, grid);
    const MonteCarloResult r =
        monte_carlo_value(model, std::cref(policy), rho0, horizon, o.traj, seed, o.threads);
    mc.push_back(r);
    const std::size_t cell = nearest_grid_point(rho0, grid);
    runs.push_back(Json{{"n", n},
                        {"grid_size", grid.size()},
                        {"grid_provenance", to_json(grid.provenance())},
                        {"finite_mdp_value_at_rho0", sol.values[cell]},
                        {"finite_mdp_iters", sol.iterations},
                        {"policy", sol.policy},
                        {"mc_mean", r.mean},
                        {"mc_stderr", r.std_error}});
  }

  Json trend = Json::array();
  const MonteCarloResult& ref = mc.back();
  for (std::size_t k = 0; k + 1 < mc.size(); ++k)
    trend.push_back(Json{{"n", ns[k]},
                         {"gap_to_finest", std::abs(mc[k].mean - ref.mean)},
                         {"stderr", mc[k].std_error + ref.std_error}});
  bool non_increasing = true;
  for (std::size_t k = 0; k + 1 < trend.size(); ++k)
    non_increasing = non_increasing &&
                     trend[k + 1]["gap_to_finest"].get<double>() <=
                         trend[k]["gap_to_finest"].get<double>() +
                             3.0 * (mc[k].std_error + mc[k + 1].std_error);

  const Json report{{"runs", runs},
                    {"trend", trend},
                    {"trend_non_increasing_within_3se", non_increasing},
                    {"horizon", horizon},
                    {"truncation_bound", ref.truncation_bound},
                    {"n_traj", o.traj},
                    {"rho0", to_json(rho0)},
                    {"config", {{"eps", o.eps}, {"beta", model.beta()}, {"seed", seed}, {"n", ns}}}};
  write_report(report, o.output, out);
  if (!o.output.empty())
    for (const auto& run : runs)
      out << "n=" << run["n"].get<std::size_t>() << "  grid=" << run["grid_size"].get<std::size_t>()
          << "  MC=" << std::setprecision(8) << run["mc_mean"].get<double>() << " +- "
          << run["mc_stderr"].get<double>() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// state-prep

int cmd_state_prep(const Options& o, std::ostream& out, std::ostream& err) {
  StatePrepConfig config;
  config.dim_x = o.dim_x;
  config.dim_a = o.dim_a;
  config.seed = require_seed(o);
  if (o.n.size() != 1) throw ParseError("state-prep takes a single --n");
  config.n = o.n.front();
  config.target = parse_amplitudes(o.target);
  if (!o.initial.empty()) config.initial = parse_amplitudes(o.initial);
  if (!o.povm.empty()) {
    std::vector<Matrix> povm;
    for (const auto& el : read_json(o.povm).at("povm")) povm.push_back(matrix_from_json(el));
    config.povm = std::move(povm);
  }
  config.sources = parse_sources(o.sources);
  config.solver = solver_config(o, o.beta_override.value_or(0.9));

  const StatePrepReport r = state_prep_demo(config);
  Json labels = Json::array();
  const Json report{
      {"grid_values", r.solution.v.values},
      {"policy_indices", r.solution.policy.indices},
      {"iters", r.solution.iters},
      {"residual", r.solution.residual},
      {"converged", r.solution.converged},
      {"config", config_json(config.solver, o, config.n, config.seed)},
      {"net_provenance", to_json(r.net_provenance)},
      {"grid_provenance", to_json(r.grid_provenance)},
      {"grid_size", r.grid_size},
      {"net_size", r.net_size},
      {"target", vector_to_json(config.target)},
      {"initial_grid_index", r.initial_grid_index},
      {"cost_sample_range", {r.min_cost_sample, r.max_cost_sample}},
      {"rollout_cost", r.greedy.value},
      {"rollout_truncation_bound", r.greedy.truncation_bound},
      {"rollout_actions", r.greedy.actions},
      {"stage_costs", r.greedy.stage_costs},
      {"fidelity_trajectory", r.fidelity_trajectory},
      {"appending_baseline_cost", json_or_null(r.baseline_cost)},
      {"appending_baseline_index", r.baseline_index}};
  write_report(report, o.output, out);
  if (!o.output.empty())
    out << "rollout cost " << std::setprecision(10) << r.greedy.value
        << ", best appending baseline " << r.baseline_cost << ", first-stage cost "
        << r.greedy.stage_costs.front() << "\n";
  if (!r.solution.converged) {
    err << "value iteration did not converge, residual " << r.solution.residual << "\n";
    return kNotConverged;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum Markov decision process toolkit", "qmdp"};
  app.require_subcommand(1);
  Options o;

  auto add_io = [&o](CLI::App* sub) {
    sub->add_option("--input", o.input, "Input JSON file")->required();
    sub->add_option("--output", o.output, "Report path (default: standard output)");
  };
  auto add_solver = [&o](CLI::App* sub) {
    sub->add_option("--eps", o.eps, "Target sup-norm accuracy")->capture_default_str();
    sub->add_option("--beta-override", o.beta_override, "Replace the model discount factor");
    sub->add_option("--max-iters", o.max_iters, "Value-iteration sweep cap")->capture_default_str();
  };
  auto add_random = [&o](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Seed for every randomized construction");
    sub->add_option("--threads", o.threads, "Worker thread cap")->capture_default_str();
  };

  auto* validate = app.add_subcommand("validate", "Check channels and density operators in a file");
  add_io(validate);

  auto* solve_classical = app.add_subcommand("solve-classical", "Value iteration on a finite MDP");
  add_io(solve_classical);
  add_solver(solve_classical);

  auto* embed = app.add_subcommand("embed", "Write the quantum form of a finite MDP");
  add_io(embed);
  embed->add_option("--beta-override", o.beta_override, "Replace the model discount factor");

  auto* solve_qmdp = app.add_subcommand("solve-qmdp", "Grid value iteration on an embedded model");
  add_io(solve_qmdp);
  add_solver(solve_qmdp);
  add_random(solve_qmdp);
  solve_qmdp->add_option("--n", o.n, "Grid and net resolution")->capture_default_str();
  solve_qmdp->add_option("--sources", o.sources, "Net sources")->capture_default_str();
  solve_qmdp->add_option("--lookup", o.lookup, "nearest | basis_mixture")->capture_default_str();
  solve_qmdp->add_option("--horizon", o.horizon, "Rollout horizon");

  auto* solve_qomdp = app.add_subcommand("solve-qomdp", "Quantize, solve and simulate a QOMDP");
  add_io(solve_qomdp);
  add_solver(solve_qomdp);
  add_random(solve_qomdp);
  solve_qomdp->add_option("--n", o.n, "Grid resolutions, comma separated")->delimiter(',');
  solve_qomdp->add_option("--traj", o.traj, "Monte Carlo trajectories")->capture_default_str();
  solve_qomdp->add_option("--horizon", o.horizon, "Simulation horizon (default: truncation 1e-4)");

  auto* state_prep = app.add_subcommand("state-prep", "Solve the state preparation problem");
  state_prep->add_option("--output", o.output, "Report path (default: standard output)");
  add_solver(state_prep);
  add_random(state_prep);
  state_prep->add_option("--dim-x", o.dim_x, "System dimension")->capture_default_str();
  state_prep->add_option("--dim-a", o.dim_a, "Action dimension")->capture_default_str();
  state_prep->add_option("--target", o.target, "Target amplitudes, re[:im] comma separated")
      ->capture_default_str();
  state_prep->add_option("--initial", o.initial, "Initial amplitudes (default |0>)");
  state_prep->add_option("--povm", o.povm, "JSON file {\"povm\": [matrix, ...]}");
  state_prep->add_option("--n", o.n, "Grid and net resolution")->capture_default_str();
  state_prep->add_option("--sources", o.sources, "Net sources")->capture_default_str();
  state_prep->add_option("--lookup", o.lookup, "nearest | basis_mixture")->capture_default_str();
  state_prep->add_option("--horizon", o.horizon, "Rollout horizon (default 200)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kParseFailed;
  }

  try {
    if (*validate) return cmd_validate(o, out);
    if (*solve_classical) return cmd_solve_classical(o, out);
    if (*embed) return cmd_embed(o, out);
    if (*solve_qmdp) return cmd_solve_qmdp(o, out, err);
    if (*solve_qomdp) return cmd_solve_qomdp(o, out);
    if (*state_prep) return cmd_state_prep(o, out, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseFailed;
  } catch (const Json::exception& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseFailed;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kValidationFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailed;
  }
  return kParseFailed;
}

}  // namespace qmdp::cli
