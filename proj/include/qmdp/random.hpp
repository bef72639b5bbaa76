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

#include <cstdint>
#include <random>

#include "qmdp/quantum_core.hpp"

namespace qmdp {

/// Pseudo-random engine used by every seeded construction.
using Rng = std::mt19937_64;

/// Independent substream for (seed, tag). Equal arguments give equal streams.
Rng make_stream(std::uint64_t seed, std::uint64_t tag);

/// Haar-distributed unitary (QR of a complex Ginibre matrix, phases fixed).
Matrix haar_unitary(std::size_t dim, Rng& rng);

/// Haar-random unit vector.
Vector random_pure_vector(std::size_t dim, Rng& rng);

/// Hilbert-Schmidt random mixed state G G^dagger / Tr(G G^dagger).
DensityOperator random_density(std::size_t dim, Rng& rng);

}  // namespace qmdp
