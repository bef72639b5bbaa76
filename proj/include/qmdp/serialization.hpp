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

// JSON encodings. A complex scalar is [re, im], a matrix is a row-major
// nested array of scalars, a channel is {"in_dim", "out_dim", "kraus"} and a
// density operator is {"dim", "matrix"}. Doubles round-trip exactly.

#include <json.hpp>

#include "qmdp/approximation.hpp"
#include "qmdp/classical_mdp.hpp"
#include "qmdp/embedding.hpp"
#include "qmdp/policies.hpp"
#include "qmdp/quantum_core.hpp"

namespace qmdp {

using Json = nlohmann::json;

Json to_json(const Complex& z);
Complex complex_from_json(const Json& j);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

/// Vectors are stored as a flat array of complex scalars.
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json to_json(const DensityOperator& rho);
DensityOperator density_from_json(const Json& j, const Tolerances& tol = {});

Json to_json(const KrausChannel& ch);
KrausChannel channel_from_json(const Json& j);

/// {"n_states", "n_actions", "p", "c", "beta"} with p indexed [x][a][y].
Json to_json(const FiniteMDP& mdp);
FiniteMDP mdp_from_json(const Json& j);

/// Rows indexed [x][a].
Json to_json(const StochasticKernel& pi);
StochasticKernel kernel_from_json(const Json& j);

Json to_json(const PhiFamily& phi);
PhiFamily phi_from_json(const Json& j);

/// {"kind", "payload", "stationary", "sequence"}. The payload describes the
/// stationary tail; "sequence" lists payloads for the steps before it.
/// Payloads: classical -> kernel rows, open_loop -> {"dim_x", "xi"},
/// closed_loop -> phi family, general -> channel.
Json policy_to_json(PolicyKind kind, const Json& tail_payload,
                    const std::vector<Json>& sequence = {});
MarkovQuantumPolicy policy_from_json(const Json& j);

Json to_json(const QOMDPModel& model);
QOMDPModel qomdp_from_json(const Json& j);

Json to_json(const GridProvenance& p);
Json to_json(const NetProvenance& p);

Json to_json(const StateGrid& grid);
StateGrid grid_from_json(const Json& j);

Json to_json(const ChannelNet& net);
ChannelNet net_from_json(const Json& j);

Json to_json(const EmbeddedModel& model);
EmbeddedModel embedded_model_from_json(const Json& j);

}  // namespace qmdp
