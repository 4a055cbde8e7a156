#pragma once

// Volume comparison metrics: PSNR, relative L2 error, voxelwise error
// quantiles and the relative total-variation norm.
//
// PSNR and voxelwise errors are normalized by the reference dynamic
// range, so percentages are comparable across integer- and float-valued
// data. TV uses interior forward differences only, with no boundary
// extension. Reductions accumulate in 64-bit with a fixed pairwise
// order, so results do not depend on how the work is scheduled.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "voxsub/volume.hpp"

namespace voxsub {

struct MetricsReport {
  double psnr_db = 0.0;  ///< may be +infinity for identical volumes
  double rel_l2_percent = 0.0;
  double voxel_median_percent = 0.0;
  double voxel_q99_percent = 0.0;
  double rel_tv_percent = 0.0;
};

namespace detail {

template <class F>
double pairwise_reduce(index_t lo, index_t hi, const F& f) {
  if (hi - lo <= 64) {
    double s = 0.0;
    for (index_t i = lo; i < hi; ++i) s += f(i);
    return s;
  }
  const index_t mid = lo + (hi - lo) / 2;
  return pairwise_reduce(lo, mid, f) + pairwise_reduce(mid, hi, f);
}

inline void require_same_dims(const Volume& a, const Volume& b) {
  if (a.dims != b.dims) throw std::invalid_argument("volume dimensions differ");
}

inline std::pair<double, double> min_max(const Volume& v) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : v.data) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return {lo, hi};
}

/// Quantile by linear interpolation between order statistics; mutates e.
inline double quantile(std::vector<double>& e, double q) {
  const std::size_t n = e.size();
  if (n == 1) return e[0];
  const double pos = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  std::nth_element(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(lo), e.end());
  const double vlo = e[lo];
  if (frac == 0.0) return vlo;
  const double vhi = *std::min_element(e.begin() + static_cast<std::ptrdiff_t>(lo) + 1, e.end());
  return vlo + frac * (vhi - vlo);
}

}  // namespace detail

/// 10 log10(R^2 / MSE) with R the reference dynamic range; +inf when equal.
inline double psnr(const Volume& ref, const Volume& test) {
  detail::require_same_dims(ref, test);
  const auto [lo, hi] = detail::min_max(ref);
  const double range = hi - lo;
  if (!(range > 0.0)) throw std::invalid_argument("psnr: reference has zero dynamic range");
  const double* r = ref.data.data();
  const double* t = test.data.data();
  const double sq = detail::pairwise_reduce(0, ref.size(), [&](index_t i) {
    const double d = t[i] - r[i];
    return d * d;
  });
  const double mse = sq / static_cast<double>(ref.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(range * range / mse);
}

/// 100 * ||test - ref||_2 / ||ref||_2
inline double relative_l2(const Volume& ref, const Volume& test) {
  detail::require_same_dims(ref, test);
  const double* r = ref.data.data();
  const double* t = test.data.data();
  const double den = detail::pairwise_reduce(0, ref.size(), [&](index_t i) { return r[i] * r[i]; });
  if (!(den > 0.0)) throw std::invalid_argument("relative_l2: reference norm is zero");
  const double num = detail::pairwise_reduce(0, ref.size(), [&](index_t i) {
    const double d = t[i] - r[i];
    return d * d;
  });
  return 100.0 * std::sqrt(num) / std::sqrt(den);
}

/// Median and 99% quantile of 100 |test - ref| / R, R the reference range.
inline std::pair<double, double> voxelwise_stats(const Volume& ref, const Volume& test) {
  detail::require_same_dims(ref, test);
  const auto [lo, hi] = detail::min_max(ref);
  const double range = hi - lo;
  if (!(range > 0.0)) throw std::invalid_argument("voxelwise_stats: reference has zero dynamic range");
  std::vector<double> e(ref.data.size());
  for (std::size_t i = 0; i < e.size(); ++i)
    e[i] = 100.0 * std::abs(test.data[i] - ref.data[i]) / range;
  const double med = detail::quantile(e, 0.5);
  const double q99 = detail::quantile(e, 0.99);
  return {med, q99};
}

/// Anisotropic total variation: sum over the three axes of the absolute
/// forward differences across interior voxel pairs.
inline double tv_norm(const Volume& v) {
  std::vector<double> row_sums;
  row_sums.reserve(static_cast<std::size_t>(3 * v.ny() * v.nz()));
  const auto push_rows = [&](int axis) {
    const index_t n = v.dims[axis];
    if (n < 2) return;
    const int u = axis == 0 ? 1 : 0;
    const int w = axis == 2 ? 1 : 2;
    const index_t stride = axis == 0 ? 1 : axis == 1 ? v.dims[0] : v.dims[0] * v.dims[1];
    IVec3 p{0, 0, 0};
    for (index_t b = 0; b < v.dims[w]; ++b)
      for (index_t a = 0; a < v.dims[u]; ++a) {
        p[u] = a;
        p[w] = b;
        p[axis] = 0;
        const double* d = &v.data[static_cast<std::size_t>(v.index(p[0], p[1], p[2]))];
        double s = 0.0;
        for (index_t i = 0; i + 1 < n; ++i) s += std::abs(d[(i + 1) * stride] - d[i * stride]);
        row_sums.push_back(s);
      }
  };
  for (int axis = 0; axis < 3; ++axis) push_rows(axis);
  if (row_sums.empty()) return 0.0;
  return detail::pairwise_reduce(0, static_cast<index_t>(row_sums.size()),
                                 [&](index_t i) { return row_sums[static_cast<std::size_t>(i)]; });
}

/// 100 * tv_norm(test) / tv_norm(ref)
inline double relative_tv(const Volume& ref, const Volume& test) {
  detail::require_same_dims(ref, test);
  const double tr = tv_norm(ref);
  if (!(tr > 0.0)) throw std::invalid_argument("relative_tv: reference TV is zero");
  return 100.0 * tv_norm(test) / tr;
}

/// All five metrics of one comparison.
inline MetricsReport compute_metrics(const Volume& ref, const Volume& test) {
  MetricsReport m;
  m.psnr_db = psnr(ref, test);
  m.rel_l2_percent = relative_l2(ref, test);
  const auto [med, q99] = voxelwise_stats(ref, test);
  m.voxel_median_percent = med;
  m.voxel_q99_percent = q99;
  m.rel_tv_percent = relative_tv(ref, test);
  return m;
}

/// Fixed-key UTF-8 text serialization, one `key = value` line per metric.
inline std::string serialize_report(const MetricsReport& m) {
  const auto num = [](double x) -> std::string {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
  };
  std::string s;
  s += "psnr_db = " + num(m.psnr_db) + "\n";
  s += "rel_l2_percent = " + num(m.rel_l2_percent) + "\n";
  s += "voxel_median_percent = " + num(m.voxel_median_percent) + "\n";
  s += "voxel_q99_percent = " + num(m.voxel_q99_percent) + "\n";
  s += "rel_tv_percent = " + num(m.rel_tv_percent) + "\n";
  return s;
}

}  // namespace voxsub
