#include <algorithm>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "proxyfit/aggregation.hpp"
#include "proxyfit/error.hpp"
#include "proxyfit/raster.hpp"
#include "scene_fixtures.hpp"

using namespace proxyfit;

namespace {

RgbImage solid(int w, int h, const Rgb& c) {
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.set(x, y, c);
  return img;
}

std::vector<RgbImage> random_uv_samples(int k, std::uint64_t seed, int size = 16) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<RgbImage> out;
  for (int s = 0; s < k; ++s) {
    RgbImage img(size, size);
    for (auto& b : img.data) b = std::uint8_t(byte(rng));
    out.push_back(img);
  }
  return out;
}

}  // namespace

TEST(AggregateUv, MedianOfThree) {
  const std::vector<RgbImage> s{solid(1, 1, encode_uv(Vec2(0.2, 0.9))), solid(1, 1, encode_uv(Vec2(0.5, 0.2))),
                                solid(1, 1, encode_uv(Vec2(0.9, 0.5)))};
  const UvAggregate a = aggregate_uv(s);
  EXPECT_EQ(a.uv_hat.at(0, 0), encode_uv(Vec2(0.5, 0.5)));
}

TEST(AggregateUv, EvenCountTakesLowerMiddle) {
  const std::vector<RgbImage> s{solid(1, 1, {10, 0, 255}), solid(1, 1, {40, 0, 255}), solid(1, 1, {20, 0, 255}),
                                solid(1, 1, {30, 0, 255})};
  EXPECT_EQ(aggregate_uv(s).uv_hat.at(0, 0)[0], 20);
}

TEST(AggregateUv, IdenticalSamplesHaveZeroVariance) {
  const auto base = random_uv_samples(1, 3);
  const std::vector<RgbImage> s(5, base[0]);
  const UvAggregate a = aggregate_uv(s);
  EXPECT_EQ(a.uv_hat, base[0]);
  for (float v : a.u_uv.data) EXPECT_EQ(v, 0.0f);
}

TEST(AggregateUv, VarianceMatchesTwoPassOracle) {
  for (int k : {2, 5, 10}) {
    const auto s = random_uv_samples(k, 40 + k);
    const UvAggregate a = aggregate_uv(s);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        double expect = 0.0;
        for (int ch = 0; ch < 3; ++ch) {
          std::vector<double> v;
          for (const auto& img : s) v.push_back(img.at(x, y)[ch] / 255.0);
          expect += oracle::two_pass_variance(v) / 3.0;
        }
        // u_uv is stored as float.
        EXPECT_NEAR(a.u_uv.at(x, y), expect, 1e-7) << "K=" << k;
      }
  }
}

TEST(AggregateUv, MedianIsPermutationInvariant) {
  auto s = random_uv_samples(5, 7);
  const UvAggregate a = aggregate_uv(s);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 5; ++t) {
    std::shuffle(s.begin(), s.end(), rng);
    const UvAggregate b = aggregate_uv(s);
    EXPECT_EQ(b.uv_hat, a.uv_hat);
    EXPECT_EQ(b.u_uv, a.u_uv);
  }
}

TEST(AggregateUv, RejectsEmptyAndMismatchedInput) {
  EXPECT_THROW(aggregate_uv(std::vector<RgbImage>{}), Error);
  const std::vector<RgbImage> s{RgbImage(4, 4), RgbImage(4, 5)};
  EXPECT_THROW(aggregate_uv(s), Error);
}

TEST(SegUncertainty, Examples) {
  EXPECT_NEAR(seg_uncertainty(4, 5), 0.4, 1e-15);
  EXPECT_EQ(seg_uncertainty(5, 5), 0.0);
  EXPECT_EQ(seg_uncertainty(2, 5), 1.0);
  EXPECT_EQ(seg_uncertainty(1, 1), 0.0);
  EXPECT_EQ(seg_uncertainty(2, 4), 1.0);
  EXPECT_NEAR(seg_uncertainty(3, 4), 0.5, 1e-15);
}

TEST(AggregateSeg, MajorityAndUncertainty) {
  const Palette& pal = fixture::palette();
  const Rgb a = pal.color(2), b = pal.color(5);
  const std::vector<RgbImage> s{solid(2, 1, a), solid(2, 1, a), solid(2, 1, a), solid(2, 1, a), solid(2, 1, b)};
  const SegAggregate r = aggregate_seg(s, pal, PaletteSubset::kAll);
  EXPECT_EQ(r.labels[0], 2);
  EXPECT_NEAR(r.u_seg.at(0, 0), 0.4f, 1e-7);
}

TEST(AggregateSeg, TiesPreferBackgroundThenLowestId) {
  const Palette& pal = fixture::palette();
  const Rgb bg{0, 0, 0}, a = pal.color(3), b = pal.color(9);
  const std::vector<RgbImage> bg_tie{solid(1, 1, a), solid(1, 1, bg), solid(1, 1, bg), solid(1, 1, a)};
  EXPECT_EQ(aggregate_seg(bg_tie, pal, PaletteSubset::kAll).labels[0], kBackground);
  const std::vector<RgbImage> part_tie{solid(1, 1, b), solid(1, 1, a), solid(1, 1, b), solid(1, 1, a)};
  const SegAggregate r = aggregate_seg(part_tie, pal, PaletteSubset::kAll);
  EXPECT_EQ(r.labels[0], 3);
  EXPECT_EQ(r.u_seg.at(0, 0), 1.0f);
}

TEST(WeightMap, Examples) {
  FloatMap uuv(4, 1), useg(4, 1);
  uuv.at(1, 0) = 0.2f;
  useg.at(1, 0) = 1.0f;
  uuv.at(2, 0) = 0.04f;
  useg.at(2, 0) = 0.4f;
  uuv.at(3, 0) = 3.0f;
  const FloatMap w = weight_map(uuv, useg);
  EXPECT_EQ(w.at(0, 0), 1.0f);
  EXPECT_EQ(w.at(1, 0), 0.0f);
  EXPECT_NEAR(w.at(2, 0), 0.576, 1e-6);
  EXPECT_EQ(w.at(3, 0), 0.0f);
  for (float v : w.data) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
}

TEST(Aggregate, SingleSamplePassesThrough) {
  const PosedMesh mesh = forward(fixture::model(), fixture::pose(5));
  const Proxy p = rasterize(mesh, fixture::model(), fixture::rig(mesh, 1, 5)[0], fixture::palette());
  const AggregatedProxy a = aggregate(std::vector<Proxy>{p}, fixture::palette(), PaletteSubset::kAll);
  EXPECT_EQ(a.k, 1);
  EXPECT_EQ(a.uv_hat, p.uv);
  EXPECT_EQ(seg_image(a, fixture::palette()), p.seg);
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x) {
      EXPECT_EQ(a.u_uv.at(x, y), 0.0f);
      EXPECT_EQ(a.u_seg.at(x, y), 0.0f);
      EXPECT_EQ(a.weight.at(x, y), 1.0f);
    }
}

TEST(Aggregate, FileRoundTrip) {
  const Palette& pal = fixture::palette();
  const PosedMesh mesh = forward(fixture::model(), fixture::pose(6));
  const Proxy p = rasterize(mesh, fixture::model(), fixture::rig(mesh, 1, 6)[0], pal);
  std::vector<Proxy> samples;
  for (int s = 0; s < 3; ++s) {
    Proxy q = p;
    for (size_t i = s; i < q.uv.data.size(); i += 97)
      if (q.uv.data[i] > 0 && q.uv.data[i] < 250) q.uv.data[i] += std::uint8_t(s + 1);
    samples.push_back(q);
  }
  const AggregatedProxy a = aggregate(samples, pal, PaletteSubset::kAll);
  const auto dir = std::filesystem::temp_directory_path() / ("proxyfit_agg_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  write_aggregated(a, pal, dir.string(), "view_00");
  const AggregatedProxy b = read_aggregated(pal, dir.string(), "view_00", PaletteSubset::kAll);
  EXPECT_EQ(b.seg_hat, a.seg_hat);
  EXPECT_EQ(b.uv_hat, a.uv_hat);
  EXPECT_EQ(b.u_uv, a.u_uv);
  EXPECT_EQ(b.u_seg, a.u_seg);
  EXPECT_EQ(b.weight, a.weight);
}
