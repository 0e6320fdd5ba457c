#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "proxyfit/camera.hpp"
#include "proxyfit/error.hpp"

using namespace proxyfit;

namespace {

Camera basic_camera() {
  Camera c;
  c.fx = c.fy = 200.0;
  c.cx = c.cy = 128.0;
  return c;
}

Camera random_camera(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Camera c;
  c.fx = 300 + 50 * u(rng);
  c.fy = 300 + 50 * u(rng);
  c.cx = 128 + 10 * u(rng);
  c.cy = 128 + 10 * u(rng);
  c.R = oracle::axis_angle(Vec3(u(rng), u(rng), u(rng)));
  c.t = Vec3(0.3 * u(rng), 0.3 * u(rng), 4.0);
  return c;
}

}  // namespace

TEST(Camera, OpticalAxisHitsPrincipalPoint) {
  const Projection p = project(basic_camera(), Vec3(0, 0, 1));
  EXPECT_TRUE(p.in_front);
  EXPECT_EQ(p.pixel, Vec2(128, 128));
  EXPECT_EQ(p.depth, 1.0);
}

TEST(Camera, ClosedFormExample) {
  const Projection p = project(basic_camera(), Vec3(1, 0, 2));
  EXPECT_DOUBLE_EQ(p.pixel.x(), 228.0);
  EXPECT_DOUBLE_EQ(p.pixel.y(), 128.0);
}

TEST(Camera, BehindCameraIsFlagged) {
  EXPECT_FALSE(project(basic_camera(), Vec3(0, 0, -1)).in_front);
  EXPECT_FALSE(project(basic_camera(), Vec3(1, 1, 0)).in_front);
}

TEST(Camera, MatchesHomogeneousOracle) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const Camera c = random_camera(rng);
    const Vec3 X(u(rng), u(rng), u(rng));
    const Projection p = project(c, X);
    ASSERT_TRUE(p.in_front);
    const Vec2 ref = oracle::project_homogeneous(c, X, 0.5 + std::abs(u(rng)));
    EXPECT_LT((p.pixel - ref).norm(), 1e-9);
    EXPECT_NEAR(p.depth, (c.R * X + c.t).z(), 1e-12);
  }
}

TEST(Camera, FullImageCropIsIdentity) {
  const Camera c = basic_camera();
  const Camera out = crop_camera(c, PixelRect{0, 0, 256, 256}, 256);
  EXPECT_TRUE(out == c);
}

TEST(Camera, CropIsAffineRemap) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Camera c = random_camera(rng);
    const double w = 10 + 200 * u(rng), h = 10 + 200 * u(rng);
    const PixelRect box{(256 - w) * u(rng), (256 - h) * u(rng), w, h};
    const int out_size = 64 + static_cast<int>(192 * u(rng));
    const Camera cc = crop_camera(c, box, out_size);
    const Vec3 X(u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5);
    const Vec2 full = project(c, X).pixel;
    const Vec2 remap((full.x() - box.x) * out_size / box.w, (full.y() - box.y) * out_size / box.h);
    EXPECT_LT((project(cc, X).pixel - remap).norm(), 1e-9);
    EXPECT_EQ(cc.width, out_size);
  }
}

TEST(Camera, CropsCompose) {
  const Camera c = basic_camera();
  const Camera a = crop_camera(c, PixelRect{40, 60, 128, 128}, 256);
  const Camera ab = crop_camera(a, PixelRect{64, 32, 64, 64}, 128);
  const Camera direct = crop_camera(c, PixelRect{40 + 32, 60 + 16, 32, 32}, 128);
  EXPECT_NEAR(ab.fx, direct.fx, 1e-12);
  EXPECT_NEAR(ab.cx, direct.cx, 1e-12);
  EXPECT_NEAR(ab.cy, direct.cy, 1e-12);
}

TEST(Camera, CropRejectsBadBoxes) {
  const Camera c = basic_camera();
  EXPECT_THROW(crop_camera(c, PixelRect{0, 0, 0, 10}, 64), ValidationError);
  EXPECT_THROW(crop_camera(c, PixelRect{200, 0, 100, 10}, 64), ValidationError);
  EXPECT_THROW(crop_camera(c, PixelRect{0, 0, 10, 10}, 0), ValidationError);
}

TEST(Camera, EnlargeBoxStaysInImage) {
  const PixelRect r = enlarge_box(PixelRect{240, 5, 10, 20}, 1.5, 256, 256);
  EXPECT_DOUBLE_EQ(r.w, 30.0);
  EXPECT_DOUBLE_EQ(r.h, 30.0);
  EXPECT_GE(r.x, 0.0);
  EXPECT_GE(r.y, 0.0);
  EXPECT_LE(r.x + r.w, 256.0);
  EXPECT_LE(r.y + r.h, 256.0);
  const PixelRect centred = enlarge_box(PixelRect{100, 100, 20, 10}, 2.0, 256, 256);
  EXPECT_EQ(centred, (PixelRect{90, 85, 40, 40}));
  const PixelRect huge = enlarge_box(PixelRect{0, 0, 200, 200}, 2.0, 256, 256);
  EXPECT_EQ(huge, (PixelRect{0, 0, 256, 256}));
}

TEST(Camera, SingleViewRigFacesTarget) {
  RigConfig cfg;
  cfg.n_views = 1;
  const auto rig = sample_rig(cfg);
  ASSERT_EQ(rig.size(), 1u);
  const Projection p = project(rig[0], cfg.target);
  EXPECT_TRUE(p.in_front);
  EXPECT_NEAR(p.pixel.x(), rig[0].cx, 1e-9);
  EXPECT_NEAR(p.pixel.y(), rig[0].cy, 1e-9);
  EXPECT_NO_THROW(validate_camera(rig[0]));
}

TEST(Camera, RigIsDeterministicAndSeparated) {
  RigConfig cfg;
  cfg.seed = 42;
  const auto a = sample_rig(cfg);
  EXPECT_EQ(a, sample_rig(cfg));
  const double pi = std::acos(-1.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    cfg.seed = seed;
    const auto rig = sample_rig(cfg);
    ASSERT_EQ(rig.size(), 4u);
    for (size_t i = 0; i < rig.size(); ++i)
      for (size_t j = i + 1; j < rig.size(); ++j) {
        const Vec3 di = (rig[i].center() - cfg.target).normalized();
        const Vec3 dj = (rig[j].center() - cfg.target).normalized();
        const double deg = std::acos(std::clamp(di.dot(dj), -1.0, 1.0)) * 180.0 / pi;
        EXPECT_GE(deg, 30.0) << "seed " << seed << " views " << i << "," << j;
      }
  }
}

TEST(Camera, ValidateRejectsImproperRotation) {
  Camera c = basic_camera();
  c.R(0, 0) = -1.0;
  EXPECT_THROW(validate_camera(c), ValidationError);
  c = basic_camera();
  c.fx = 0.0;
  EXPECT_THROW(validate_camera(c), ValidationError);
}

TEST(Camera, JsonRoundTripIsExact) {
  RigConfig cfg;
  cfg.n_views = 6;
  cfg.seed = 3;
  const auto rig = sample_rig(cfg);
  EXPECT_EQ(cameras_from_json(cameras_to_json(rig)), rig);
  EXPECT_THROW(cameras_from_json("[{\"fx\": 1"), ParseError);
}
