#pragma once

// Shared configuration for the 1D and 3D refinement operations.

#include <stdexcept>
#include <string>

#include "voxsub/volume.hpp"

namespace voxsub {

enum class SubdivisionMode { Linear, Nonlinear };

/// Tension parameter of the nonlinear scheme; must exceed 1.
struct TensionParam {
  double tau = 2.0;
};

struct SubdivisionConfig {
  SubdivisionMode mode = SubdivisionMode::Linear;
  double tau = 2.0;                        ///< used in Nonlinear mode only
  BoundaryPolicy boundary = BoundaryPolicy::Mirror;
  IVec3 tile_dims{64, 64, 64};
  index_t halo = 6;                        ///< per-side input extension of a tile
  int workers = 1;

  void validate() const {
    for (index_t t : tile_dims)
      if (t < 1) throw std::invalid_argument("tile_dims must be positive");
    const index_t min_halo = mode == SubdivisionMode::Nonlinear ? 6 : 3;
    if (halo < min_halo)
      throw std::invalid_argument("halo must be >= " + std::to_string(min_halo) +
                                  " for this mode");
    if (mode == SubdivisionMode::Nonlinear && !(tau > 1.0))
      throw std::invalid_argument("tension parameter tau must be > 1");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  }
};

}  // namespace voxsub
