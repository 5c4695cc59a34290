// ----------------------------------------------------------------------------
// Copyright 2026 The ArgueLab Authors
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
// ----------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <random>

#include "argue/numerics.hpp"

namespace argue {

using Rng = std::mt19937_64;

// Independent stream seed for a named purpose; keeps e.g. the encoder weights
// unchanged when the task generator draws more or fewer samples.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

Vector gaussian_vector(std::size_t n, Rng& rng, double stddev = 1.0);
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng, double stddev = 1.0);

// Haar-style random matrix with orthonormal columns (rows >= cols) or rows
// (rows < cols): QR of a Gaussian draw with the R-diagonal sign fixed.
Matrix random_orthogonal(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace argue
