#pragma once

// Subsample-then-upsample evaluation: halve the resolution by block
// pooling, refine back up, and measure against the original.
//
// The refinement's child grid sits half a coarse cell past the pooling
// block grid, i.e. child m is co-located with original cell m+1 along
// each axis. Metrics are therefore computed over the co-located overlap:
// original voxels [1, n) against refined voxels [0, n-1).

#include "voxsub/config.hpp"
#include "voxsub/metrics.hpp"
#include "voxsub/phantom.hpp"
#include "voxsub/subdivide3d.hpp"
#include "voxsub/volume.hpp"

namespace voxsub {

inline MetricsReport roundtrip_metrics(const Volume& original, const SubdivisionConfig& config) {
  for (index_t d : original.dims)
    if (d % 2 != 0 || d < 4)
      throw std::invalid_argument("roundtrip requires even dimensions of at least 4");
  const Volume down = downsample2(original);
  const Volume up = subdivide3d_tiled(down, config);
  const IVec3 overlap{original.dims[0] - 1, original.dims[1] - 1, original.dims[2] - 1};
  const Volume ref = extract_roi(original, {1, 1, 1}, overlap);
  const Volume test = extract_roi(up, {0, 0, 0}, overlap);
  return compute_metrics(ref, test);
}

}  // namespace voxsub
