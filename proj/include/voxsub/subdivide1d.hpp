#pragma once

// The 1D two-phase refinement scheme, linear and nonlinear.
//
// A sequence holds cell averages; one step produces the 2n half-cell
// averages. Output 2i+phase is b^phase applied to f plus c^phase applied
// to D, where D_j is the second difference of the boundary-extended
// signal, clamped through phi against the threshold K_j in nonlinear
// mode. Differences are always taken of the extended signal, which keeps
// the exact identity a = b + d2*c intact at the boundaries.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "voxsub/config.hpp"
#include "voxsub/kernels.hpp"
#include "voxsub/volume.hpp"

namespace voxsub {

namespace detail {

inline double seq_ext(const std::vector<double>& f, index_t j, BoundaryPolicy policy) {
  return f[static_cast<std::size_t>(fold_index(j, static_cast<index_t>(f.size()), policy))];
}

/// First difference of the extended signal at any index j.
inline double seq_dext(const std::vector<double>& f, index_t j, BoundaryPolicy policy) {
  return seq_ext(f, j + 1, policy) - seq_ext(f, j, policy);
}

/// Second difference of the extended signal at any index j.
inline double seq_d2ext(const std::vector<double>& f, index_t j, BoundaryPolicy policy) {
  return seq_ext(f, j + 2, policy) - 2.0 * seq_ext(f, j + 1, policy) + seq_ext(f, j, policy);
}

}  // namespace detail

/// Delta f_j = f_{j+1} - f_j for j in [0, n), reads boundary-extended.
inline std::vector<double> forward_diff(const std::vector<double>& f, BoundaryPolicy policy) {
  if (f.empty()) throw std::invalid_argument("forward_diff: empty input");
  std::vector<double> out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j)
    out[j] = detail::seq_dext(f, static_cast<index_t>(j), policy);
  return out;
}

/// Delta^2 f_j = f_{j+2} - 2 f_{j+1} + f_j for j in [0, n), reads extended.
inline std::vector<double> second_diff(const std::vector<double>& f, BoundaryPolicy policy) {
  if (f.empty()) throw std::invalid_argument("second_diff: empty input");
  std::vector<double> out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j)
    out[j] = detail::seq_d2ext(f, static_cast<index_t>(j), policy);
  return out;
}

/// K_i = tau * min over j in [-2,2] of |Delta f_{i+j}| + |Delta f_{i+j+1}|,
/// with first differences of the boundary-extended signal. Always >= 0.
inline double threshold_k(const std::vector<double>& f, index_t i, double tau,
                          BoundaryPolicy policy) {
  if (f.empty()) throw std::invalid_argument("threshold_k: empty input");
  if (!(tau > 1.0)) throw std::invalid_argument("threshold_k: tau must be > 1");
  double prev = std::abs(detail::seq_dext(f, i - 2, policy));
  double best = std::numeric_limits<double>::infinity();
  for (index_t j = -1; j <= 3; ++j) {
    const double cur = std::abs(detail::seq_dext(f, i + j, policy));
    const double pair = prev + cur;
    if (pair < best) best = pair;
    prev = cur;
  }
  return tau * best;
}

/// Sign-preserving magnitude clamp: phi(d2, k) = sign(d2) min(|d2|, k).
/// k == 0 yields exactly 0; unclamped values pass through unchanged.
inline double clamp_phi(double d2, double k) {
  if (k < 0.0) throw std::invalid_argument("clamp_phi: negative threshold");
  if (k == 0.0) return 0.0;
  if (std::abs(d2) <= k) return d2;
  return std::copysign(k, d2);
}

/// One refinement step on a sequence of n cell averages; returns 2n values.
inline std::vector<double> subdivide1d(const std::vector<double>& f,
                                       const SubdivisionConfig& config) {
  if (f.empty()) throw std::invalid_argument("subdivide1d: empty input");
  const bool nonlinear = config.mode == SubdivisionMode::Nonlinear;
  if (nonlinear && !(config.tau > 1.0))
    throw std::invalid_argument("subdivide1d: tau must be > 1");

  const index_t n = static_cast<index_t>(f.size());
  const BoundaryPolicy policy = config.boundary;

  // D over the range read by the c stencils: j in [-2, n].
  std::vector<double> d(static_cast<std::size_t>(n + 3));
  for (index_t j = -2; j <= n; ++j) {
    double v = detail::seq_d2ext(f, j, policy);
    if (nonlinear) v = clamp_phi(v, threshold_k(f, j, config.tau, policy));
    d[static_cast<std::size_t>(j + 2)] = v;
  }

  const KernelSet& k = kernel_set();
  std::vector<double> out(static_cast<std::size_t>(2 * n));
  for (index_t i = 0; i < n; ++i) {
    for (int phase = 0; phase < 2; ++phase) {
      const Stencil<6>& b = phase == 0 ? k.b0 : k.b1;
      const Stencil<4>& c = phase == 0 ? k.c0 : k.c1;
      double acc = 0.0;
      for (int r = -2; r <= 3; ++r) acc += b.tap(r) * detail::seq_ext(f, i + r, policy);
      for (int r = -2; r <= 1; ++r) acc += c.tap(r) * d[static_cast<std::size_t>(i + r + 2)];
      out[static_cast<std::size_t>(2 * i + phase)] = acc;
    }
  }
  return out;
}

/// Cell averages f_i = (1/h) * integral of F over the cell centered at
/// center0 + i*h, by 5-point Gauss-Legendre quadrature per cell (exact
/// for polynomials up to degree 9).
inline std::vector<double> sample_cell_averages(const std::function<double(double)>& F,
                                                double center0, double h, index_t n) {
  if (!(h > 0.0)) throw std::invalid_argument("sample_cell_averages: h must be > 0");
  static constexpr double kNode[5] = {
      -0.90617984593866399280, -0.53846931010568309104, 0.0,
      0.53846931010568309104, 0.90617984593866399280};
  static constexpr double kWeight[5] = {
      0.23692688505618908751, 0.47862867049936646804, 0.56888888888888888889,
      0.47862867049936646804, 0.23692688505618908751};
  std::vector<double> out(static_cast<std::size_t>(n));
  for (index_t i = 0; i < n; ++i) {
    const double c = center0 + h * static_cast<double>(i);
    double acc = 0.0;
    for (int q = 0; q < 5; ++q) acc += kWeight[q] * F(c + 0.5 * h * kNode[q]);
    out[static_cast<std::size_t>(i)] = 0.5 * acc;
  }
  return out;
}

}  // namespace voxsub
