#pragma once

// Synthetic test volume with thin, flat, cubic and spherical structures,
// and the 2x2x2 mean-pooling downsampler used by roundtrip evaluation.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "voxsub/volume.hpp"

namespace voxsub {

/// Shape layout in a 256-based reference frame; coordinates scale
/// proportionally to the generated dimensions. Values are binary by
/// voxel-center membership except the gradient ball, which falls off
/// linearly from 1 at the centre to 0 at the surface.
struct PhantomSpec {
  struct Box {
    IVec3 lo, hi;  ///< inclusive reference coordinates, value 1
  };
  struct Ball {
    std::array<double, 3> center;
    double radius;
    bool gradient;
  };

  std::vector<Box> boxes;
  std::vector<Ball> balls;
  double reference_extent = 256.0;

  static PhantomSpec default_spec() {
    PhantomSpec s;
    s.boxes = {
        {{24, 24, 24}, {87, 87, 87}},        // solid cube
        {{120, 32, 32}, {123, 35, 151}},     // thin stick
        {{24, 24, 200}, {151, 151, 201}},    // plane A
        {{24, 24, 152}, {151, 25, 201}},     // plane B, attached to A along the shared edge
    };
    s.balls = {
        {{180.0, 64.0, 64.0}, 36.0, false},  // solid sphere
        {{180.0, 180.0, 180.0}, 36.0, true}, // gradient sphere
    };
    return s;
  }
};

/// Generate the phantom at the given dimensions (>= 64 per axis).
inline Volume generate_phantom(const IVec3& dims, const PhantomSpec& spec) {
  for (index_t d : dims)
    if (d < 64) throw std::invalid_argument("phantom dimensions must be >= 64 per axis");

  Volume v = create_volume(dims, 0.0);
  std::array<double, 3> s;
  for (int a = 0; a < 3; ++a) s[a] = static_cast<double>(dims[a]) / spec.reference_extent;

  constexpr double eps = 1e-9;
  for (const auto& box : spec.boxes) {
    IVec3 lo, hi;
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::max<index_t>(0, static_cast<index_t>(
          std::ceil(static_cast<double>(box.lo[a]) * s[a] - eps)));
      hi[a] = std::min<index_t>(dims[a] - 1, static_cast<index_t>(
          std::floor(static_cast<double>(box.hi[a]) * s[a] + (s[a] - 1.0) + eps)));
    }
    for (index_t z = lo[2]; z <= hi[2]; ++z)
      for (index_t y = lo[1]; y <= hi[1]; ++y)
        for (index_t x = lo[0]; x <= hi[0]; ++x) v.at(x, y, z) = 1.0;
  }

  for (const auto& ball : spec.balls) {
    std::array<double, 3> c, r;
    IVec3 lo, hi;
    for (int a = 0; a < 3; ++a) {
      c[a] = ball.center[a] * s[a];
      r[a] = ball.radius * s[a];
      lo[a] = std::max<index_t>(0, static_cast<index_t>(std::ceil(c[a] - r[a] - eps)));
      hi[a] = std::min<index_t>(dims[a] - 1, static_cast<index_t>(std::floor(c[a] + r[a] + eps)));
    }
    for (index_t z = lo[2]; z <= hi[2]; ++z)
      for (index_t y = lo[1]; y <= hi[1]; ++y)
        for (index_t x = lo[0]; x <= hi[0]; ++x) {
          const double dx = (static_cast<double>(x) - c[0]) / r[0];
          const double dy = (static_cast<double>(y) - c[1]) / r[1];
          const double dz = (static_cast<double>(z) - c[2]) / r[2];
          const double rn = std::sqrt(dx * dx + dy * dy + dz * dz);
          if (rn > 1.0) continue;
          const double val = ball.gradient ? 1.0 - rn : 1.0;
          double& out = v.at(x, y, z);
          out = std::max(out, val);
        }
  }
  return v;
}

/// Halve every dimension by averaging disjoint 2x2x2 blocks.
inline Volume downsample2(const Volume& v) {
  for (index_t d : v.dims)
    if (d % 2 != 0) throw std::invalid_argument("downsample2 requires even dimensions");
  Volume out = create_volume({v.dims[0] / 2, v.dims[1] / 2, v.dims[2] / 2}, 0.0);
  if (v.voxel_size) out.voxel_size = *v.voxel_size * 2.0;
  for (index_t z = 0; z < out.dims[2]; ++z)
    for (index_t y = 0; y < out.dims[1]; ++y)
      for (index_t x = 0; x < out.dims[0]; ++x) {
        double sum = 0.0;
        for (index_t dz = 0; dz < 2; ++dz)
          for (index_t dy = 0; dy < 2; ++dy)
            for (index_t dx = 0; dx < 2; ++dx)
              sum += v.at(2 * x + dx, 2 * y + dy, 2 * z + dz);
        out.at(x, y, z) = sum * 0.125;
      }
  return out;
}

}  // namespace voxsub
