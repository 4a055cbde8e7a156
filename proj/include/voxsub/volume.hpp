#pragma once

// 3D scalar volumes on an isotropic grid: storage, indexing, boundary
// extension and region extraction. Data is laid out x-fastest, then y,
// then z; values are kept in 64-bit floating point.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace voxsub {

using index_t = std::int64_t;
using IVec3 = std::array<index_t, 3>;

/// How reads outside the grid are resolved, per axis independently.
enum class BoundaryPolicy {
  Mirror,    ///< half-sample reflection: -1 -> 0, -2 -> 1, n -> n-1, ...
  Periodic,  ///< index arithmetic modulo the axis length
};

namespace detail {

/// Total fold of an arbitrary signed index into [0, n). Mirror folds with
/// period 2n (repeated reflection), so it is defined for every i and any
/// n >= 1 and coincides with single reflection while |excursion| < n.
inline index_t fold_index(index_t i, index_t n, BoundaryPolicy policy) {
  if (i >= 0 && i < n) return i;
  if (policy == BoundaryPolicy::Periodic) {
    index_t m = i % n;
    return m < 0 ? m + n : m;
  }
  const index_t p = 2 * n;
  index_t m = i % p;
  if (m < 0) m += p;
  return m < n ? m : p - 1 - m;
}

inline index_t checked_element_count(const IVec3& dims) {
  constexpr index_t kMaxElements = index_t{1} << 42;
  index_t total = 1;
  for (index_t d : dims) {
    if (d < 1) throw std::invalid_argument("volume dimensions must be positive");
    if (d > kMaxElements / total) throw std::invalid_argument("volume dimensions overflow");
    total *= d;
  }
  return total;
}

}  // namespace detail

/// Dense scalar volume. Immutable after construction on all read paths;
/// concurrent readers are safe.
struct Volume {
  IVec3 dims{0, 0, 0};
  std::vector<double> data;                 ///< size nx*ny*nz, x fastest
  std::optional<double> voxel_size;         ///< physical edge length in um, metadata only

  index_t nx() const { return dims[0]; }
  index_t ny() const { return dims[1]; }
  index_t nz() const { return dims[2]; }
  index_t size() const { return static_cast<index_t>(data.size()); }

  index_t index(index_t x, index_t y, index_t z) const {
    return x + dims[0] * (y + dims[1] * z);
  }
  double at(index_t x, index_t y, index_t z) const { return data[index(x, y, z)]; }
  double& at(index_t x, index_t y, index_t z) { return data[index(x, y, z)]; }

  bool in_range(const IVec3& p) const {
    for (int a = 0; a < 3; ++a)
      if (p[a] < 0 || p[a] >= dims[a]) return false;
    return true;
  }
};

/// New volume of the given dimensions with every voxel set to `fill`.
inline Volume create_volume(const IVec3& dims, double fill) {
  if (!std::isfinite(fill)) throw std::invalid_argument("fill value must be finite");
  Volume v;
  const index_t total = detail::checked_element_count(dims);
  v.dims = dims;
  v.data.assign(static_cast<std::size_t>(total), fill);
  return v;
}

/// Read voxel `p`, resolving out-of-range coordinates by `policy`.
/// Mirror requires the excursion past either end to stay below the axis
/// length (single reflection); larger excursions are a range error.
inline double get_extended(const Volume& v, const IVec3& p, BoundaryPolicy policy) {
  IVec3 q;
  for (int a = 0; a < 3; ++a) {
    const index_t n = v.dims[a];
    if (policy == BoundaryPolicy::Mirror) {
      const index_t excursion = p[a] < 0 ? -p[a] : (p[a] >= n ? p[a] - n + 1 : 0);
      if (excursion >= n)
        throw std::out_of_range("mirror excursion " + std::to_string(excursion) +
                                " exceeds axis length " + std::to_string(n));
    }
    q[a] = detail::fold_index(p[a], n, policy);
  }
  return v.at(q[0], q[1], q[2]);
}

/// Copy of the axis-aligned sub-volume at `origin` with extents `rdims`.
inline Volume extract_roi(const Volume& v, const IVec3& origin, const IVec3& rdims) {
  for (int a = 0; a < 3; ++a) {
    if (origin[a] < 0 || rdims[a] < 1 || origin[a] + rdims[a] > v.dims[a])
      throw std::out_of_range("ROI exceeds volume bounds on axis " + std::to_string(a));
  }
  Volume out = create_volume(rdims, 0.0);
  for (index_t z = 0; z < rdims[2]; ++z)
    for (index_t y = 0; y < rdims[1]; ++y) {
      const double* src = &v.data[static_cast<std::size_t>(
          v.index(origin[0], origin[1] + y, origin[2] + z))];
      double* dst = &out.data[static_cast<std::size_t>(out.index(0, y, z))];
      for (index_t x = 0; x < rdims[0]; ++x) dst[x] = src[x];
    }
  return out;
}

/// Relabel axes: output axis a takes its extent and data from input axis
/// perm[a]. perm must be a permutation of {0,1,2}.
inline Volume permute_axes(const Volume& v, const std::array<int, 3>& perm) {
  std::array<bool, 3> seen{false, false, false};
  for (int a : perm) {
    if (a < 0 || a > 2 || seen[a]) throw std::invalid_argument("invalid axis permutation");
    seen[a] = true;
  }
  Volume out = create_volume({v.dims[perm[0]], v.dims[perm[1]], v.dims[perm[2]]}, 0.0);
  out.voxel_size = v.voxel_size;
  IVec3 p;  // position in the input volume
  for (index_t z = 0; z < out.dims[2]; ++z)
    for (index_t y = 0; y < out.dims[1]; ++y)
      for (index_t x = 0; x < out.dims[0]; ++x) {
        p[perm[0]] = x;
        p[perm[1]] = y;
        p[perm[2]] = z;
        out.at(x, y, z) = v.at(p[0], p[1], p[2]);
      }
  return out;
}

inline bool all_finite(const Volume& v) {
  for (double x : v.data)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace voxsub
