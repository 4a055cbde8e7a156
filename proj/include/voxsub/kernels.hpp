#pragma once

// Stencil coefficient tables of the two-phase refinement scheme.
//
// The even/odd-phase masks a0/a1 admit an exact decomposition into the
// 10th-order B-spline masks b0/b1 plus second-difference corrections
// c0/c1 composed with d2 = (1,-2,1):
//
//   a^k = b^k + d2 * c^k   (as stencils, k in {0,1})
//
// All coefficients are integer numerators over 1024, stored exactly; the
// double tables are derived from the rationals. The application
// convention everywhere is (f * s)_i = sum_r s_r f_{i+r} over the stated
// offsets; no kernel flip.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace voxsub {

/// Exact rational with 64-bit numerator/denominator, always normalized.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  constexpr void normalize() {
    if (den == 0) throw std::invalid_argument("zero denominator");
    if (den < 0) { num = -num; den = -den; }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  friend constexpr Rational operator+(Rational a, Rational b) {
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend constexpr Rational operator-(Rational a, Rational b) {
    return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend constexpr Rational operator*(Rational a, Rational b) {
    return Rational(a.num * b.num, a.den * b.den);
  }
  friend constexpr bool operator==(Rational a, Rational b) {
    return a.num == b.num && a.den == b.den;
  }
  constexpr Rational abs() const { return num < 0 ? Rational(-num, den) : *this; }
  constexpr bool less_than(Rational o) const { return num * o.den < o.num * den; }
  constexpr double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// A stencil with explicit offset range [lo, lo + N).
template <int N>
struct Stencil {
  int lo;                                ///< offset of the first tap
  std::array<std::int64_t, N> num;       ///< numerators over `den`
  std::int64_t den;
  std::array<double, N> w;               ///< derived double taps

  constexpr Rational rat(int offset) const {
    return Rational(num[static_cast<std::size_t>(offset - lo)], den);
  }
  constexpr double tap(int offset) const { return w[static_cast<std::size_t>(offset - lo)]; }
};

namespace detail {
template <int N>
constexpr Stencil<N> make_stencil(int lo, std::array<std::int64_t, N> num, std::int64_t den) {
  Stencil<N> s{lo, num, den, {}};
  for (int i = 0; i < N; ++i) s.w[i] = static_cast<double>(num[i]) / static_cast<double>(den);
  return s;
}
template <std::size_t N>
constexpr std::array<std::int64_t, N> reversed(const std::array<std::int64_t, N>& a) {
  std::array<std::int64_t, N> r{};
  for (std::size_t i = 0; i < N; ++i) r[i] = a[N - 1 - i];
  return r;
}
}  // namespace detail

/// The complete stencil family. a0/a1 are the full refinement masks,
/// b0/b1 the B-spline parts, c0/c1 the second-difference corrections,
/// d2 the forward second-difference stencil.
struct KernelSet {
  Stencil<6> a0, a1;  ///< offsets -2..+3
  Stencil<6> b0, b1;  ///< offsets -2..+3
  Stencil<4> c0, c1;  ///< offsets -2..+1
  Stencil<3> d2;      ///< offsets 0..+2, taps (1, -2, 1)
};

inline const KernelSet& kernel_set() {
  static const KernelSet k = [] {
    KernelSet s;
    const std::array<std::int64_t, 6> a0n{14, -126, 924, 276, -74, 10};
    const std::array<std::int64_t, 6> b0n{11, 165, 462, 330, 55, 1};
    const std::array<std::int64_t, 4> c0n{3, -285, -111, 9};
    s.a0 = detail::make_stencil<6>(-2, a0n, 1024);
    s.a1 = detail::make_stencil<6>(-2, detail::reversed(a0n), 1024);
    s.b0 = detail::make_stencil<6>(-2, b0n, 1024);
    s.b1 = detail::make_stencil<6>(-2, detail::reversed(b0n), 1024);
    s.c0 = detail::make_stencil<4>(-2, c0n, 1024);
    s.c1 = detail::make_stencil<4>(-2, detail::reversed(c0n), 1024);
    s.d2 = detail::make_stencil<3>(0, {1, -2, 1}, 1);
    return s;
  }();
  return k;
}

/// Expands b^k + (d2 composed with c^k) in exact rational arithmetic and
/// returns the largest absolute deviation from a^k over both phases and
/// all offsets. The decomposition is exact, so this returns 0.
inline double kernel_identity_residual() {
  const KernelSet& k = kernel_set();
  Rational worst(0, 1);
  const auto check_phase = [&](const Stencil<6>& a, const Stencil<6>& b, const Stencil<4>& c) {
    // (d2 * c)(f)_i = sum_t c_t (f_{i+t} + ... ) expands to taps at offsets -2..+3:
    // coefficient of f_{i+s} is sum over t with s-t in [0,2] of c_t * d2_{s-t}.
    for (int s = -2; s <= 3; ++s) {
      Rational comp(0, 1);
      for (int t = -2; t <= 1; ++t) {
        const int r = s - t;
        if (r >= 0 && r <= 2) comp = comp + c.rat(t) * k.d2.rat(r);
      }
      const Rational dev = (b.rat(s) + comp - a.rat(s)).abs();
      if (worst.less_than(dev)) worst = dev;
    }
  };
  check_phase(k.a0, k.b0, k.c0);
  check_phase(k.a1, k.b1, k.c1);
  return worst.to_double();
}

}  // namespace voxsub
