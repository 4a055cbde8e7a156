#include <catch2/catch_amalgamated.hpp>

#include "voxsub/kernels.hpp"

using namespace voxsub;

TEST_CASE("kernel tables match the published coefficients") {
  const KernelSet& k = kernel_set();

  CHECK(k.a0.rat(0) == Rational(231, 256));
  CHECK(k.a0.rat(-2) == Rational(7, 512));
  CHECK(k.a0.rat(-1) == Rational(-63, 512));
  CHECK(k.a0.rat(1) == Rational(69, 256));
  CHECK(k.a0.rat(2) == Rational(-37, 512));
  CHECK(k.a0.rat(3) == Rational(5, 512));

  CHECK(k.b0.rat(-2) == Rational(11, 1024));
  CHECK(k.b0.rat(0) == Rational(231, 512));
  CHECK(k.b0.rat(3) == Rational(1, 1024));

  CHECK(k.c0.rat(-2) == Rational(3, 1024));
  CHECK(k.c0.rat(-1) == Rational(-285, 1024));
  CHECK(k.c1.rat(-1) == Rational(-111, 1024));

  CHECK(k.d2.rat(0) == Rational(1, 1));
  CHECK(k.d2.rat(1) == Rational(-2, 1));
  CHECK(k.d2.rat(2) == Rational(1, 1));
}

TEST_CASE("phase-1 stencils are exact reversals of phase 0") {
  const KernelSet& k = kernel_set();
  for (int i = 0; i < 6; ++i) {
    CHECK(k.a1.num[static_cast<std::size_t>(i)] == k.a0.num[static_cast<std::size_t>(5 - i)]);
    CHECK(k.b1.num[static_cast<std::size_t>(i)] == k.b0.num[static_cast<std::size_t>(5 - i)]);
  }
  for (int i = 0; i < 4; ++i)
    CHECK(k.c1.num[static_cast<std::size_t>(i)] == k.c0.num[static_cast<std::size_t>(3 - i)]);
}

TEST_CASE("stencil sums are exact") {
  const KernelSet& k = kernel_set();
  const auto sum6 = [](const Stencil<6>& s) {
    Rational r(0, 1);
    for (int off = -2; off <= 3; ++off) r = r + s.rat(off);
    return r;
  };
  const auto sum4 = [](const Stencil<4>& s) {
    Rational r(0, 1);
    for (int off = -2; off <= 1; ++off) r = r + s.rat(off);
    return r;
  };
  CHECK(sum6(k.a0) == Rational(1, 1));
  CHECK(sum6(k.a1) == Rational(1, 1));
  CHECK(sum6(k.b0) == Rational(1, 1));
  CHECK(sum6(k.b1) == Rational(1, 1));
  CHECK(sum4(k.c0) == Rational(-3, 8));
  CHECK(sum4(k.c1) == Rational(-3, 8));
  CHECK(k.d2.rat(0) + k.d2.rat(1) + k.d2.rat(2) == Rational(0, 1));
}

TEST_CASE("b + d2*c expands exactly to a") {
  const KernelSet& k = kernel_set();
  // spot-check two expansion coefficients of phase 0
  const Rational f_im1 = k.b0.rat(-1) + k.c0.rat(-1) * k.d2.rat(0) + k.c0.rat(-2) * k.d2.rat(1);
  CHECK(f_im1 == Rational(-63, 512));
  const Rational f_ip3 = k.b0.rat(3) + k.c0.rat(1) * k.d2.rat(2);
  CHECK(f_ip3 == Rational(5, 512));

  CHECK(kernel_identity_residual() == 0.0);
}

TEST_CASE("double taps mirror the rationals") {
  const KernelSet& k = kernel_set();
  for (int off = -2; off <= 3; ++off) {
    CHECK(k.a0.tap(off) == k.a0.rat(off).to_double());
    CHECK(k.b1.tap(off) == k.b1.rat(off).to_double());
  }
}
