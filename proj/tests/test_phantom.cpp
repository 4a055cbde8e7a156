#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "voxsub/phantom.hpp"
#include "voxsub/subdivide3d.hpp"

using namespace voxsub;

TEST_CASE("phantom landmark voxels at the reference size") {
  const Volume v = generate_phantom({256, 256, 256}, PhantomSpec::default_spec());

  CHECK(v.at(180, 180, 180) == 1.0);            // gradient sphere centre
  CHECK(v.at(180, 180, 162) == 0.5);            // 18 voxels from the centre
  CHECK(v.at(0, 0, 0) == 0.0);                  // background
  CHECK(v.at(24, 24, 24) == 1.0);               // cube corner
  CHECK(v.at(87, 87, 87) == 1.0);
  CHECK(v.at(88, 24, 24) == 0.0);
  CHECK(v.at(120, 32, 32) == 1.0);              // stick
  CHECK(v.at(124, 32, 32) == 0.0);
  CHECK(v.at(100, 100, 200) == 1.0);            // plane A
  CHECK(v.at(100, 24, 180) == 1.0);             // plane B
  CHECK(v.at(180, 64, 64) == 1.0);              // solid sphere centre
  CHECK(v.at(180, 64, 64 + 36) == 1.0);         // on the surface
  CHECK(v.at(180, 64, 64 + 37) == 0.0);

  double lo = 1e300, hi = -1e300;
  for (double x : v.data) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(lo == 0.0);
  CHECK(hi == 1.0);
}

TEST_CASE("phantom scales proportionally and validates dims") {
  const Volume v = generate_phantom({128, 128, 128}, PhantomSpec::default_spec());
  CHECK(v.at(90, 90, 90) == 1.0);   // gradient sphere centre at 180/2
  CHECK(v.at(0, 0, 0) == 0.0);
  CHECK(v.at(12, 12, 12) == 1.0);   // cube corner at 24/2
  CHECK(v.at(44, 12, 12) == 0.0);   // past the scaled cube

  CHECK_THROWS_AS(generate_phantom({32, 128, 128}, PhantomSpec::default_spec()),
                  std::invalid_argument);
}

TEST_CASE("downsample2 block pooling") {
  Volume v = create_volume({4, 2, 2}, 1.0);
  const Volume d1 = downsample2(v);
  REQUIRE(d1.dims == IVec3{2, 1, 1});
  CHECK(d1.data[0] == 1.0);
  CHECK(d1.data[1] == 1.0);

  // block holding four 0s and four 1s averages to 0.5
  Volume w = create_volume({2, 2, 2}, 0.0);
  w.at(0, 0, 1) = w.at(1, 0, 1) = w.at(0, 1, 1) = w.at(1, 1, 1) = 1.0;
  CHECK(downsample2(w).data[0] == 0.5);

  CHECK_THROWS_AS(downsample2(create_volume({3, 2, 2}, 0.0)), std::invalid_argument);
}

TEST_CASE("downsample2 preserves the global mean") {
  const Volume v = generate_phantom({64, 64, 64}, PhantomSpec::default_spec());
  const Volume d = downsample2(v);
  double mv = 0.0, md = 0.0;
  for (double x : v.data) mv += x;
  for (double x : d.data) md += x;
  CHECK(std::abs(mv / double(v.size()) - md / double(d.size())) < 1e-13);
}

TEST_CASE("downsample then subdivide restores the original shape") {
  const Volume v = generate_phantom({64, 64, 64}, PhantomSpec::default_spec());
  SubdivisionConfig cfg;
  cfg.mode = SubdivisionMode::Nonlinear;
  const Volume up = subdivide3d_tiled(downsample2(v), cfg);
  CHECK(up.dims == v.dims);
}
