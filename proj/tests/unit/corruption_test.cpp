#include <cmath>

#include <gtest/gtest.h>

#include "proxyfit/corruption.hpp"
#include "proxyfit/error.hpp"
#include "proxyfit/raster.hpp"
#include "scene_fixtures.hpp"

using namespace proxyfit;

namespace {

Proxy gt_proxy(std::uint64_t seed) {
  const PosedMesh mesh = forward(fixture::model(), fixture::pose(seed));
  return rasterize(mesh, fixture::model(), fixture::rig(mesh, 1, seed)[0], fixture::palette());
}

// 100 x 100 block of one body part with uv (0.5, 0.5).
Proxy flat_proxy() {
  Proxy p{RgbImage(kProxySize, kProxySize), RgbImage(kProxySize, kProxySize)};
  const Rgb uv = encode_uv(Vec2(0.5, 0.5));
  for (int y = 0; y < 100; ++y)
    for (int x = 0; x < 100; ++x) {
      p.seg.set(x, y, fixture::palette().color(0));
      p.uv.set(x, y, uv);
    }
  return p;
}

}  // namespace

TEST(Corruption, IdentitySpecReturnsInput) {
  const Proxy p = gt_proxy(1);
  CorruptionSpec spec;
  spec.seed = 99;
  EXPECT_EQ(corrupt(p, fixture::palette(), spec, 0, 3), p);
}

TEST(Corruption, UvNoiseHasRequestedSpread) {
  CorruptionSpec spec;
  spec.uv_sigma = 0.05;
  spec.seed = 5;
  const Proxy out = corrupt(flat_proxy(), fixture::palette(), spec, 0, 0);
  for (int ch = 0; ch < 2; ++ch) {
    double s = 0, s2 = 0;
    int n = 0;
    for (int y = 0; y < 100; ++y)
      for (int x = 0; x < 100; ++x) {
        const double v = out.uv.at(x, y)[ch] / 255.0;
        s += v;
        s2 += v * v;
        ++n;
      }
    const double mean = s / n;
    const double sd = std::sqrt(s2 / n - mean * mean);
    EXPECT_NEAR(sd, 0.05, 0.005) << "channel " << ch;
    EXPECT_NEAR(mean, 128.0 / 255.0, 0.003);
  }
}

TEST(Corruption, RegionFlipRecoloursOnlyThatRegion) {
  const Palette& pal = fixture::palette();
  const Proxy p = gt_proxy(2);
  const Proxy out = flip_region(p, pal, "left_leg");
  EXPECT_EQ(out.uv, p.uv);
  int flipped = 0;
  for (int y = 0; y < p.seg.height; ++y)
    for (int x = 0; x < p.seg.width; ++x) {
      const int before = decode_pixel(p, x, y, pal).part;
      const Rgb after = out.seg.at(x, y);
      if (before != kBackground && pal.entries[before].region == "left_leg") {
        EXPECT_EQ(after, pal.color(pal.entries[before].mirror));
        EXPECT_EQ(pal.entries[pal.entries[before].mirror].region, "right_leg");
        ++flipped;
      } else {
        EXPECT_EQ(after, p.seg.at(x, y));
      }
    }
  EXPECT_GT(flipped, 0);
}

TEST(Corruption, LabelFlipsGoToMirrorsOnly) {
  const Palette& pal = fixture::palette();
  const Proxy p = gt_proxy(3);
  CorruptionSpec spec;
  spec.label_flip_prob = 0.3;
  spec.seed = 8;
  const Proxy out = corrupt(p, pal, spec, 1, 0);
  int changed = 0, sided = 0;
  for (int y = 0; y < p.seg.height; ++y)
    for (int x = 0; x < p.seg.width; ++x) {
      const int a = decode_pixel(p, x, y, pal).part;
      const int b = decode_pixel(out, x, y, pal).part;
      if (a == kBackground) {
        EXPECT_EQ(b, kBackground);
        continue;
      }
      if (pal.entries[a].mirror < 0) {
        EXPECT_EQ(a, b);
        continue;
      }
      ++sided;
      if (a != b) {
        EXPECT_EQ(b, pal.entries[a].mirror);
        ++changed;
      }
    }
  ASSERT_GT(sided, 500);
  EXPECT_NEAR(double(changed) / sided, 0.3, 0.05);
}

TEST(Corruption, DeterministicPerSeedViewSample) {
  const Palette& pal = fixture::palette();
  const Proxy p = gt_proxy(4);
  CorruptionSpec spec;
  spec.uv_sigma = 0.03;
  spec.label_flip_prob = 0.05;
  spec.region_flip_prob = 0.3;
  spec.dropout_prob = 0.01;
  spec.seed = 12;
  EXPECT_EQ(corrupt(p, pal, spec, 2, 1), corrupt(p, pal, spec, 2, 1));
  EXPECT_NE(corrupt(p, pal, spec, 2, 1), corrupt(p, pal, spec, 2, 2));
  EXPECT_NE(corrupt(p, pal, spec, 2, 1), corrupt(p, pal, spec, 3, 1));
  CorruptionSpec other = spec;
  other.seed = 13;
  EXPECT_NE(corrupt(p, pal, spec, 2, 1), corrupt(p, pal, other, 2, 1));
}

TEST(Corruption, FlippableRegionsAreSidedLimbs) {
  const auto regions = flippable_regions(fixture::palette());
  EXPECT_EQ(regions, (std::vector<std::string>{"left_arm", "left_hand", "left_leg", "right_arm", "right_hand", "right_leg"}));
}

TEST(Corruption, InvalidSpecIsRejected) {
  CorruptionSpec spec;
  spec.label_flip_prob = 1.5;
  EXPECT_THROW(validate_corruption(spec), ValidationError);
  spec = {};
  spec.uv_sigma = -0.1;
  EXPECT_THROW(validate_corruption(spec), ValidationError);
}
