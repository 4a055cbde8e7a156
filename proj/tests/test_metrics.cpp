#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "voxsub/metrics.hpp"
#include "voxsub/volume.hpp"

using namespace voxsub;

namespace {
Volume span01(index_t n) {  // ramp spanning [0, 1], dynamic range exactly 1
  Volume v = create_volume({n, 1, 1}, 0.0);
  for (index_t i = 0; i < n; ++i)
    v.data[static_cast<std::size_t>(i)] = double(i) / double(n - 1);
  return v;
}
Volume shifted(const Volume& v, double d) {
  Volume out = v;
  for (double& x : out.data) x += d;
  return out;
}
}  // namespace

TEST_CASE("psnr") {
  const Volume ref = span01(64);
  CHECK(std::isinf(psnr(ref, ref)));
  CHECK(psnr(ref, shifted(ref, 0.1)) == Catch::Approx(20.0).margin(1e-9));
  CHECK(psnr(ref, shifted(ref, 0.01)) == Catch::Approx(40.0).margin(1e-9));

  CHECK_THROWS_AS(psnr(ref, create_volume({2, 1, 1}, 0.0)), std::invalid_argument);
  const Volume flat = create_volume({4, 1, 1}, 1.0);
  CHECK_THROWS_AS(psnr(flat, flat), std::invalid_argument);
}

TEST_CASE("relative_l2") {
  const Volume ref = span01(64);
  CHECK(relative_l2(ref, ref) == 0.0);

  Volume scaled = ref;
  for (double& x : scaled.data) x *= 1.1;
  CHECK(relative_l2(ref, scaled) == Catch::Approx(10.0).margin(1e-9));

  Volume a = create_volume({2, 1, 1}, 0.0), b = a;
  a.data = {3.0, 4.0};
  b.data = {3.0, 5.0};
  CHECK(relative_l2(a, b) == Catch::Approx(20.0).margin(1e-12));

  const Volume zero = create_volume({4, 1, 1}, 0.0);
  CHECK_THROWS_AS(relative_l2(zero, zero), std::invalid_argument);
}

TEST_CASE("voxelwise_stats") {
  const Volume ref = span01(64);
  const auto [m0, q0] = voxelwise_stats(ref, ref);
  CHECK(m0 == 0.0);
  CHECK(q0 == 0.0);

  const auto [m1, q1] = voxelwise_stats(ref, shifted(ref, 0.01));
  CHECK(m1 == Catch::Approx(1.0).margin(1e-9));
  CHECK(q1 == Catch::Approx(1.0).margin(1e-9));

  // 99.5% of voxels at 1%, 0.5% at 5%: the q99 interpolates inside the 1% mass
  const index_t n = 200;
  const Volume r2 = span01(n);
  Volume t2 = r2;
  for (index_t i = 0; i < n; ++i)
    t2.data[static_cast<std::size_t>(i)] += (i == 57 ? 0.05 : 0.01);
  const auto [m2, q2] = voxelwise_stats(r2, t2);
  CHECK(m2 == Catch::Approx(1.0).margin(1e-9));
  CHECK(q2 == Catch::Approx(1.0).margin(1e-9));
  CHECK(q2 >= m2);
}

TEST_CASE("tv_norm") {
  CHECK(tv_norm(create_volume({5, 4, 3}, 2.0)) == 0.0);

  Volume two = create_volume({2, 1, 1}, 0.0);
  two.data = {0.0, 1.0};
  CHECK(tv_norm(two) == 1.0);

  Volume four = create_volume({2, 2, 1}, 0.0);
  four.at(0, 0, 0) = 0.0;
  four.at(1, 0, 0) = 1.0;
  four.at(0, 1, 0) = 0.0;
  four.at(1, 1, 0) = 1.0;
  CHECK(tv_norm(four) == 2.0);
}

TEST_CASE("relative_tv") {
  Volume ref = create_volume({8, 1, 1}, 0.0);
  for (index_t i = 4; i < 8; ++i) ref.data[static_cast<std::size_t>(i)] = 1.0;
  CHECK(relative_tv(ref, ref) == 100.0);

  Volume half = ref;
  for (double& x : half.data) x *= 0.5;
  CHECK(relative_tv(ref, half) == Catch::Approx(50.0).margin(1e-12));

  // a monotone smoothed transition with the same endpoints has equal TV
  Volume smooth = create_volume({8, 1, 1}, 0.0);
  smooth.data = {0.0, 0.05, 0.2, 0.45, 0.7, 0.9, 0.98, 1.0};
  CHECK(relative_tv(ref, smooth) == Catch::Approx(100.0).margin(1e-12));

  const Volume flat = create_volume({4, 1, 1}, 3.0);
  CHECK_THROWS_AS(relative_tv(flat, ref), std::invalid_argument);
}

TEST_CASE("metrics are invariant under axis relabeling of both volumes") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Volume ref = create_volume({6, 5, 4}, 0.0), test = ref;
  for (double& x : ref.data) x = dist(rng);
  for (double& x : test.data) x = dist(rng);

  const std::array<int, 3> perm{2, 0, 1};
  const Volume pr = permute_axes(ref, perm), pt = permute_axes(test, perm);
  CHECK(psnr(pr, pt) == Catch::Approx(psnr(ref, test)).margin(1e-9));
  CHECK(relative_l2(pr, pt) == Catch::Approx(relative_l2(ref, test)).margin(1e-9));
  CHECK(relative_tv(pr, pt) == Catch::Approx(relative_tv(ref, test)).margin(1e-9));
  const auto [ma, qa] = voxelwise_stats(ref, test);
  const auto [mb, qb] = voxelwise_stats(pr, pt);
  CHECK(ma == Catch::Approx(mb).margin(1e-12));
  CHECK(qa == Catch::Approx(qb).margin(1e-12));
}

TEST_CASE("psnr and voxelwise errors are invariant under joint affine rescaling") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Volume ref = create_volume({6, 6, 6}, 0.0), test = ref;
  for (double& x : ref.data) x = dist(rng);
  for (double& x : test.data) x = dist(rng);

  Volume ref2 = ref, test2 = test;
  for (double& x : ref2.data) x = 4.0 * x + 3.0;
  for (double& x : test2.data) x = 4.0 * x + 3.0;
  CHECK(psnr(ref2, test2) == Catch::Approx(psnr(ref, test)).margin(1e-9));
  const auto [ma, qa] = voxelwise_stats(ref, test);
  const auto [mb, qb] = voxelwise_stats(ref2, test2);
  CHECK(ma == Catch::Approx(mb).margin(1e-9));
  CHECK(qa == Catch::Approx(qb).margin(1e-9));

  // relative_l2 under pure scaling
  Volume ref3 = ref, test3 = test;
  for (double& x : ref3.data) x *= 4.0;
  for (double& x : test3.data) x *= 4.0;
  CHECK(relative_l2(ref3, test3) == Catch::Approx(relative_l2(ref, test)).margin(1e-9));
}

TEST_CASE("report serialization uses fixed keys") {
  MetricsReport m;
  m.psnr_db = std::numeric_limits<double>::infinity();
  m.rel_l2_percent = 0.0;
  m.voxel_median_percent = 0.125;
  m.voxel_q99_percent = 1.5;
  m.rel_tv_percent = 100.0;
  const std::string s = serialize_report(m);
  CHECK(s.find("psnr_db = inf\n") != std::string::npos);
  CHECK(s.find("rel_l2_percent = 0\n") != std::string::npos);
  CHECK(s.find("voxel_median_percent = 0.125\n") != std::string::npos);
  CHECK(s.find("voxel_q99_percent = 1.5\n") != std::string::npos);
  CHECK(s.find("rel_tv_percent = 100\n") != std::string::npos);
}
