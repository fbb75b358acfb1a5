#pragma once

#include <cstdint>

#include "olab/core/model.hpp"

namespace olab::gen {

/// Builds a grid for `config`. Every distractor stimulus allowed by the type
/// (over the seeded choice of non-outlier colors/shapes) appears at least
/// twice; leftover slots are spread round-robin. Same (config, seed) gives
/// the same grid. Throws DomainError for infeasible configurations.
Grid synthesizeGrid(const GridConfig& config, std::uint64_t seed);

}  // namespace olab::gen
