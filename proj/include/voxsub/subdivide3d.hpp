#pragma once

// Tensor-product refinement of 3D volumes, linear and nonlinear, with
// deterministic tiled parallel execution.
//
// Linear mode applies the full masks a^k separably along x, y, z. The
// nonlinear mode evaluates the eight-summand decomposition: for every
// non-empty axis subset S the composed second differences of the input
// are clamped voxelwise against a direction-dependent threshold, then
// convolved with c along the axes of S and b along the others, and the
// summands are accumulated together with the pure B-spline term.
//
// All differences are differences of the boundary-extended signal, so a
// tile only ever needs its input region plus a fixed halo and tiled
// output is bit-identical to untiled output.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "voxsub/config.hpp"
#include "voxsub/kernels.hpp"
#include "voxsub/subdivide1d.hpp"
#include "voxsub/volume.hpp"

namespace voxsub {

inline constexpr unsigned axis_x = 1u;
inline constexpr unsigned axis_y = 2u;
inline constexpr unsigned axis_z = 4u;
inline constexpr unsigned axis_xyz = 7u;

namespace detail {

inline void require_axes(unsigned axes) {
  if (axes == 0 || axes > 7) throw std::invalid_argument("axis set must be a non-empty subset of {x,y,z}");
}

/// Dense scratch grid addressed by absolute base-cell coordinates.
struct Block {
  IVec3 lo{0, 0, 0};
  IVec3 dims{0, 0, 0};
  std::vector<double> v;

  static Block uninit(const IVec3& lo, const IVec3& hi) {
    Block b;
    b.lo = lo;
    index_t total = 1;
    for (int a = 0; a < 3; ++a) {
      b.dims[a] = hi[a] - lo[a];
      if (b.dims[a] < 1) throw std::logic_error("empty block extent");
      total *= b.dims[a];
    }
    b.v.resize(static_cast<std::size_t>(total));
    return b;
  }
  index_t stride(int axis) const {
    return axis == 0 ? 1 : axis == 1 ? dims[0] : dims[0] * dims[1];
  }
  index_t offset_of(const IVec3& p) const {
    return (p[0] - lo[0]) + dims[0] * ((p[1] - lo[1]) + dims[1] * (p[2] - lo[2]));
  }
  double at_abs(const IVec3& p) const { return v[static_cast<std::size_t>(offset_of(p))]; }
  bool contains(const IVec3& p_lo, const IVec3& p_hi) const {
    for (int a = 0; a < 3; ++a)
      if (p_lo[a] < lo[a] || p_hi[a] > lo[a] + dims[a]) return false;
    return true;
  }
};

/// Copy the base-cell region [lo, hi) out of the volume, resolving
/// out-of-range coordinates through the boundary policy. The only place
/// the engine folds indices.
inline Block gather_extended(const Volume& g, const IVec3& lo, const IVec3& hi,
                             BoundaryPolicy policy) {
  Block b = Block::uninit(lo, hi);
  std::array<std::vector<index_t>, 3> map;
  for (int a = 0; a < 3; ++a) {
    map[a].resize(static_cast<std::size_t>(b.dims[a]));
    for (index_t i = 0; i < b.dims[a]; ++i)
      map[a][static_cast<std::size_t>(i)] = fold_index(lo[a] + i, g.dims[a], policy);
  }
  double* dst = b.v.data();
  for (index_t z = 0; z < b.dims[2]; ++z)
    for (index_t y = 0; y < b.dims[1]; ++y) {
      const double* src = &g.data[static_cast<std::size_t>(
          g.index(0, map[1][static_cast<std::size_t>(y)], map[2][static_cast<std::size_t>(z)]))];
      for (index_t x = 0; x < b.dims[0]; ++x) *dst++ = src[map[0][static_cast<std::size_t>(x)]];
    }
  return b;
}

/// Valid second-difference pass: out(p) = in(p+2e) - 2 in(p+e) + in(p),
/// shrinking the block by 2 at the high end of `axis`.
inline Block d2_pass(const Block& in, int axis) {
  IVec3 hi{in.lo[0] + in.dims[0], in.lo[1] + in.dims[1], in.lo[2] + in.dims[2]};
  hi[axis] -= 2;
  Block out = Block::uninit(in.lo, hi);
  const index_t s = in.stride(axis);
  double* o = out.v.data();
  for (index_t z = 0; z < out.dims[2]; ++z)
    for (index_t y = 0; y < out.dims[1]; ++y) {
      const double* a = &in.v[static_cast<std::size_t>(
          in.offset_of({in.lo[0], in.lo[1] + y, in.lo[2] + z}))];
      for (index_t x = 0; x < out.dims[0]; ++x)
        o[x] = a[x + 2 * s] - 2.0 * a[x + s] + a[x];
      o += out.dims[0];
    }
  return out;
}

/// Pair minimum of Eq-10 form along `axis` at p, on the field in `h`:
/// min over t in [-2,2] of |d1(p + t e)| + |d1(p + (t+1) e)| with
/// d1(q) = h(q+e) - h(q).
inline double pair_min_along(const Block& h, const IVec3& p, int axis) {
  const index_t s = h.stride(axis);
  IVec3 q = p;
  q[axis] -= 2;
  const double* base = &h.v[static_cast<std::size_t>(h.offset_of(q))];
  double prev = std::abs(base[s] - base[0]);
  double best = std::numeric_limits<double>::infinity();
  for (int r = 1; r <= 5; ++r) {
    const double cur = std::abs(base[(r + 1) * s] - base[r * s]);
    const double pair = prev + cur;
    if (pair < best) best = pair;
    prev = cur;
  }
  return best;
}

/// Clamp the composed difference field for axis set S over [out_lo, out_hi):
/// out(p) = phi(D(p), tau * min over w in S of pair_min_along(h_w, p, w)).
inline Block clamp_pass(unsigned S, const Block& D, const std::array<const Block*, 3>& h,
                        double tau, const IVec3& out_lo, const IVec3& out_hi) {
  {  // containment of every read this pass will make
    IVec3 need_lo = out_lo, need_hi = out_hi;
    if (!D.contains(out_lo, out_hi)) throw std::logic_error("clamp_pass: D extent");
    for (int w = 0; w < 3; ++w) {
      if (!(S & (1u << w))) continue;
      need_lo = out_lo;
      need_hi = out_hi;
      need_lo[w] -= 2;
      need_hi[w] += 4;
      if (!h[w]->contains(need_lo, need_hi)) throw std::logic_error("clamp_pass: h extent");
    }
  }
  Block out = Block::uninit(out_lo, out_hi);
  double* o = out.v.data();
  IVec3 p;
  for (p[2] = out_lo[2]; p[2] < out_hi[2]; ++p[2])
    for (p[1] = out_lo[1]; p[1] < out_hi[1]; ++p[1])
      for (p[0] = out_lo[0]; p[0] < out_hi[0]; ++p[0]) {
        double best = std::numeric_limits<double>::infinity();
        for (int w = 0; w < 3; ++w)
          if (S & (1u << w)) best = std::min(best, pair_min_along(*h[w], p, w));
        *o++ = clamp_phi(D.at_abs(p), tau * best);
      }
  return out;
}

/// Two-phase upsampling pass along `axis`. Along the pass axis the output
/// covers the doubled range [2 b0, 2 b1) where [b0, b1) = requested base
/// range; other axes carry the requested extents unchanged.
/// out(.., 2i+k, ..) = sum_r s^k_r in(.., i+r, ..).
template <int N>
inline Block upsample_pass(const Block& in, int axis, const Stencil<N>& s0, const Stencil<N>& s1,
                           IVec3 out_lo, IVec3 out_hi) {
  const index_t b0 = out_lo[axis], b1 = out_hi[axis];
  {
    IVec3 need_lo = out_lo, need_hi = out_hi;
    need_lo[axis] = b0 + s0.lo;
    need_hi[axis] = b1 + s0.lo + N - 1;  // last tap read is (b1-1) + lo + N-1
    if (!in.contains(need_lo, need_hi)) throw std::logic_error("upsample_pass: input extent");
  }
  IVec3 flo = out_lo, fhi = out_hi;
  flo[axis] = 2 * b0;
  fhi[axis] = 2 * b1;
  Block out = Block::uninit(flo, fhi);

  if (axis == 0) {
    for (index_t z = out_lo[2]; z < out_hi[2]; ++z)
      for (index_t y = out_lo[1]; y < out_hi[1]; ++y) {
        const double* a = &in.v[static_cast<std::size_t>(in.offset_of({b0, y, z}))];
        double* o = &out.v[static_cast<std::size_t>(out.offset_of({2 * b0, y, z}))];
        for (index_t i = 0; i < b1 - b0; ++i) {
          const double* base = a + i + s0.lo;
          double even = 0.0, odd = 0.0;
          for (int t = 0; t < N; ++t) {
            even += s0.w[t] * base[t];
            odd += s1.w[t] * base[t];
          }
          o[2 * i] = even;
          o[2 * i + 1] = odd;
        }
      }
    return out;
  }

  const int other = axis == 1 ? 2 : 1;  // the non-x, non-pass axis
  const index_t si = in.stride(axis);
  const index_t nx = out_hi[0] - out_lo[0];
  for (index_t u = out_lo[other]; u < out_hi[other]; ++u)
    for (index_t i = b0; i < b1; ++i) {
      IVec3 q{out_lo[0], 0, 0};
      q[other] = u;
      q[axis] = i + s0.lo;
      const double* base = &in.v[static_cast<std::size_t>(in.offset_of(q))];
      q[axis] = 2 * i;
      double* o0 = &out.v[static_cast<std::size_t>(out.offset_of(q))];
      q[axis] = 2 * i + 1;
      double* o1 = &out.v[static_cast<std::size_t>(out.offset_of(q))];
      for (index_t x = 0; x < nx; ++x) {
        double even = 0.0, odd = 0.0;
        for (int t = 0; t < N; ++t) {
          const double f = base[x + t * si];
          even += s0.w[t] * f;
          odd += s1.w[t] * f;
        }
        o0[x] = even;
        o1[x] = odd;
      }
    }
  return out;
}

inline void add_into(Block& dst, const Block& src) {
  if (dst.lo != src.lo || dst.dims != src.dims) throw std::logic_error("add_into: extent mismatch");
  for (std::size_t i = 0; i < dst.v.size(); ++i) dst.v[i] += src.v[i];
}

inline void write_block(Volume& out, const Block& b) {
  for (index_t z = 0; z < b.dims[2]; ++z)
    for (index_t y = 0; y < b.dims[1]; ++y) {
      const double* src = &b.v[static_cast<std::size_t>(b.offset_of({b.lo[0], b.lo[1] + y, b.lo[2] + z}))];
      double* dst = &out.data[static_cast<std::size_t>(out.index(b.lo[0], b.lo[1] + y, b.lo[2] + z))];
      for (index_t x = 0; x < b.dims[0]; ++x) dst[x] = src[x];
    }
}

/// One output tile over base cells [o, o+t). Writes the fine region
/// [2o, 2(o+t)) of `out`.
inline void subdivide_tile(const Volume& g, const SubdivisionConfig& cfg, const IVec3& o,
                           const IVec3& t, Volume& out) {
  const KernelSet& k = kernel_set();
  const BoundaryPolicy policy = cfg.boundary;
  IVec3 glo, ghi;
  for (int a = 0; a < 3; ++a) {
    glo[a] = o[a] - cfg.halo;
    ghi[a] = o[a] + t[a] + cfg.halo;
  }
  const Block G = gather_extended(g, glo, ghi, policy);

  // extents used by the b/c convolution stage
  const auto ext = [&](unsigned S, int a) {
    const bool in_s = (S >> a) & 1u;
    return std::pair<index_t, index_t>{o[a] - 2, o[a] + t[a] + (in_s ? 1 : 3)};
  };

  if (cfg.mode == SubdivisionMode::Linear) {
    IVec3 lo, hi;
    for (int a = 0; a < 3; ++a) std::tie(lo[a], hi[a]) = ext(0, a);
    lo[2] = o[2];
    hi[2] = o[2] + t[2];
    Block cur = upsample_pass<6>(G, 2, k.a0, k.a1, lo, hi);
    lo[2] = 2 * o[2];
    hi[2] = 2 * (o[2] + t[2]);
    lo[1] = o[1];
    hi[1] = o[1] + t[1];
    cur = upsample_pass<6>(cur, 1, k.a0, k.a1, lo, hi);
    lo[1] = 2 * o[1];
    hi[1] = 2 * (o[1] + t[1]);
    lo[0] = o[0];
    hi[0] = o[0] + t[0];
    cur = upsample_pass<6>(cur, 0, k.a0, k.a1, lo, hi);
    write_block(out, cur);
    return;
  }

  // Composed second differences D_S, ascending axis order.
  std::array<Block, 8> D;  // index by axis mask; D[0] unused
  D[1] = d2_pass(G, 0);
  D[2] = d2_pass(G, 1);
  D[4] = d2_pass(G, 2);
  D[3] = d2_pass(D[1], 1);
  D[5] = d2_pass(D[1], 2);
  D[6] = d2_pass(D[2], 2);
  D[7] = d2_pass(D[3], 2);

  // Clamp each field over exactly the extent its convolutions read.
  std::array<Block, 8> F;  // F[0] left empty; the S=0 summand reads G
  for (unsigned S = 1; S <= 7; ++S) {
    IVec3 lo, hi;
    for (int a = 0; a < 3; ++a) std::tie(lo[a], hi[a]) = ext(S, a);
    std::array<const Block*, 3> h{nullptr, nullptr, nullptr};
    for (int w = 0; w < 3; ++w)
      if (S & (1u << w)) {
        const unsigned rest = S & ~(1u << w);
        h[w] = rest == 0 ? &G : &D[rest];
      }
    F[S] = clamp_pass(S, D[S], h, cfg.tau, lo, hi);
  }
  for (unsigned S = 1; S <= 7; ++S) D[S] = Block{};  // release

  // z-pass each summand, merging into groups keyed by the (x,y) part of S.
  std::array<Block, 4> M;
  for (unsigned S = 0; S <= 7; ++S) {
    IVec3 lo, hi;
    for (int a = 0; a < 2; ++a) std::tie(lo[a], hi[a]) = ext(S, a);
    lo[2] = o[2];
    hi[2] = o[2] + t[2];
    Block z = (S & 4u) ? upsample_pass<4>(F[S], 2, k.c0, k.c1, lo, hi)
                       : upsample_pass<6>(S == 0 ? G : F[S], 2, k.b0, k.b1, lo, hi);
    if (S >= 4) F[S] = Block{};
    Block& dst = M[S & 3u];
    if (dst.v.empty())
      dst = std::move(z);
    else
      add_into(dst, z);
  }
  for (unsigned S = 1; S <= 3; ++S) F[S] = Block{};

  // y-pass, merging into groups keyed by the x part.
  std::array<Block, 2> Nx;
  for (unsigned gidx = 0; gidx <= 3; ++gidx) {
    IVec3 lo{0, o[1], 2 * o[2]}, hi{0, o[1] + t[1], 2 * (o[2] + t[2])};
    std::tie(lo[0], hi[0]) = ext(gidx, 0);
    Block y = (gidx & 2u) ? upsample_pass<4>(M[gidx], 1, k.c0, k.c1, lo, hi)
                          : upsample_pass<6>(M[gidx], 1, k.b0, k.b1, lo, hi);
    M[gidx] = Block{};
    Block& dst = Nx[gidx & 1u];
    if (dst.v.empty())
      dst = std::move(y);
    else
      add_into(dst, y);
  }

  // x-pass and final accumulation.
  const IVec3 lo{o[0], 2 * o[1], 2 * o[2]};
  const IVec3 hi{o[0] + t[0], 2 * (o[1] + t[1]), 2 * (o[2] + t[2])};
  Block res = upsample_pass<6>(Nx[0], 0, k.b0, k.b1, lo, hi);
  Nx[0] = Block{};
  Block xc = upsample_pass<4>(Nx[1], 0, k.c0, k.c1, lo, hi);
  Nx[1] = Block{};
  add_into(res, xc);
  write_block(out, res);
}

inline Volume run_tiled(const Volume& g, const SubdivisionConfig& cfg) {
  cfg.validate();
  if (!all_finite(g)) throw std::invalid_argument("subdivide3d: input contains non-finite values");
  Volume out = create_volume({2 * g.dims[0], 2 * g.dims[1], 2 * g.dims[2]}, 0.0);
  if (g.voxel_size) out.voxel_size = *g.voxel_size / 2.0;

  IVec3 tc;
  for (int a = 0; a < 3; ++a)
    tc[a] = (g.dims[a] + cfg.tile_dims[a] - 1) / cfg.tile_dims[a];
  const index_t total = tc[0] * tc[1] * tc[2];

  std::atomic<index_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const index_t ti = next.fetch_add(1, std::memory_order_relaxed);
      if (ti >= total) return;
      const IVec3 tp{ti % tc[0], (ti / tc[0]) % tc[1], ti / (tc[0] * tc[1])};
      IVec3 o, t;
      for (int a = 0; a < 3; ++a) {
        o[a] = tp[a] * cfg.tile_dims[a];
        t[a] = std::min(cfg.tile_dims[a], g.dims[a] - o[a]);
      }
      subdivide_tile(g, cfg, o, t, out);
    }
  };

  const int nthreads = static_cast<int>(std::min<index_t>(cfg.workers, total));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

/// Composed second difference of the extended signal at any position,
/// evaluated on demand (reference path for thresholds at single points).
inline double d2_eval(const Volume& g, unsigned axes, const IVec3& p, BoundaryPolicy policy) {
  if (axes == 0) {
    IVec3 q;
    for (int a = 0; a < 3; ++a) q[a] = fold_index(p[a], g.dims[a], policy);
    return g.at(q[0], q[1], q[2]);
  }
  const int m = axes & 4u ? 2 : axes & 2u ? 1 : 0;  // largest axis in the set
  const unsigned rest = axes & ~(1u << m);
  IVec3 p1 = p, p2 = p;
  p1[m] += 1;
  p2[m] += 2;
  return d2_eval(g, rest, p2, policy) - 2.0 * d2_eval(g, rest, p1, policy) +
         d2_eval(g, rest, p, policy);
}

}  // namespace detail

/// Apply the (1,-2,1) stencil once along every listed axis (ascending),
/// reads boundary-extended. `axes` is a bitmask of axis_x|axis_y|axis_z.
inline Volume axis_second_diff(const Volume& g, unsigned axes, BoundaryPolicy policy) {
  detail::require_axes(axes);
  IVec3 lo{0, 0, 0}, hi = g.dims;
  for (int a = 0; a < 3; ++a)
    if (axes & (1u << a)) hi[a] += 2;
  detail::Block b = detail::gather_extended(g, lo, hi, policy);
  for (int a = 0; a < 3; ++a)
    if (axes & (1u << a)) b = detail::d2_pass(b, a);
  Volume out = create_volume(g.dims, 0.0);
  detail::write_block(out, b);
  return out;
}

/// The seven composed difference fields, one per non-empty axis subset.
struct DifferenceFields {
  std::array<Volume, 7> fields;  ///< fields[mask-1] holds the subset `mask`

  const Volume& of(unsigned axes) const {
    detail::require_axes(axes);
    return fields[axes - 1];
  }
};

inline DifferenceFields difference_fields(const Volume& g, BoundaryPolicy policy) {
  DifferenceFields d;
  for (unsigned axes = 1; axes <= 7; ++axes)
    d.fields[axes - 1] = axis_second_diff(g, axes, policy);
  return d;
}

/// Direction-dependent clamp threshold at position p for the composed
/// difference over the axis set S. Single axis w: the Eq-10 window on the
/// first differences of g along w. Multi-axis: for each w in S the same
/// window is evaluated on h_w = composed second difference over S\{w},
/// and the smallest axis minimum is scaled by tau.
inline double mixed_threshold(const Volume& g, const IVec3& p, unsigned axes, double tau,
                              BoundaryPolicy policy) {
  detail::require_axes(axes);
  if (!(tau > 1.0)) throw std::invalid_argument("mixed_threshold: tau must be > 1");
  if (!g.in_range(p)) throw std::out_of_range("mixed_threshold: position out of range");
  double best = std::numeric_limits<double>::infinity();
  for (int w = 0; w < 3; ++w) {
    if (!(axes & (1u << w))) continue;
    const unsigned rest = axes & ~(1u << w);
    IVec3 q = p;
    q[w] -= 2;
    double prev = 0.0, cur = 0.0;
    for (int r = 0; r <= 5; ++r) {
      IVec3 q1 = q;
      q1[w] += 1;
      cur = std::abs(detail::d2_eval(g, rest, q1, policy) - detail::d2_eval(g, rest, q, policy));
      if (r > 0) best = std::min(best, prev + cur);
      prev = cur;
      q = q1;
    }
  }
  return tau * best;
}

/// One refinement step; output dimensions are twice the input's.
inline Volume subdivide3d(const Volume& g, const SubdivisionConfig& config) {
  SubdivisionConfig whole = config;
  whole.tile_dims = g.dims;
  whole.workers = 1;
  return detail::run_tiled(g, whole);
}

/// Same result as subdivide3d, computed tile by tile with `config.workers`
/// threads. Output is bit-identical for any tile_dims and worker count.
inline Volume subdivide3d_tiled(const Volume& g, const SubdivisionConfig& config) {
  return detail::run_tiled(g, config);
}

}  // namespace voxsub
