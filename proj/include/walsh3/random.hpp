#pragma once

#include <cstdint>
#include <random>

#include "walsh3/embedding.hpp"
#include "walsh3/phase_plane.hpp"
#include "walsh3/step_function.hpp"

namespace walsh3 {

using Rng = std::mt19937_64;

// Per-trial seed derived from a master seed (splitmix64 finalizer).
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial);

cplx random_gaussian(Rng& rng);
Vec random_vector(const BanachSpace& space, Rng& rng);

// Independent complex Gaussian cell values; each cell is zeroed with probability `sparsity`.
StepFunction random_step_function(const BanachSpace& space, int fine, int support, Rng& rng, double sparsity = 0.0);
// Gaussian values on each tritile kept with probability `density`.
TileFunction random_tile_function(const Truncation& plane, const BanachSpace& space, Rng& rng, double density = 1.0);

Tritile random_tritile(const Truncation& plane, Rng& rng);

} // namespace walsh3
