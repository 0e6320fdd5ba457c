#include "proxyfit/aggregation.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

#include "proxyfit/error.hpp"

namespace proxyfit {

namespace {

void check_samples(std::span<const RgbImage> samples) {
  if (samples.empty()) throw Error("aggregation needs at least one sample (K = 0)");
  for (const RgbImage& s : samples)
    if (s.width != samples[0].width || s.height != samples[0].height) throw Error("aggregation samples differ in size");
}

}  // namespace

UvAggregate aggregate_uv(std::span<const RgbImage> samples) {
  check_samples(samples);
  const int K = static_cast<int>(samples.size());
  const int W = samples[0].width, H = samples[0].height;
  UvAggregate out{RgbImage(W, H), FloatMap(W, H)};
  std::vector<std::uint8_t> vals(K);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const size_t o = samples[0].offset(x, y);
      // K * sum(v^2) - (sum v)^2 is exact in integers, so equal samples give 0.
      std::int64_t num = 0;
      for (int c = 0; c < 3; ++c) {
        std::int64_t s1 = 0, s2 = 0;
        for (int k = 0; k < K; ++k) {
          vals[k] = samples[k].data[o + c];
          s1 += vals[k];
          s2 += static_cast<std::int64_t>(vals[k]) * vals[k];
        }
        num += K * s2 - s1 * s1;
        std::nth_element(vals.begin(), vals.begin() + (K - 1) / 2, vals.end());
        out.uv_hat.data[o + c] = vals[(K - 1) / 2];
      }
      const double var_sum = static_cast<double>(num) / (static_cast<double>(K) * K * 255.0 * 255.0);
      out.u_uv.at(x, y) = static_cast<float>(var_sum / 3.0);
    }
  }
  return out;
}

double seg_uncertainty(int n_max, int k) {
  if (k <= 0) throw Error("K must be positive");
  if (2 * n_max <= k) return 1.0;
  return 2.0 * (1.0 - static_cast<double>(n_max) / k);
}

SegAggregate aggregate_seg(std::span<const RgbImage> samples, const Palette& palette, PaletteSubset subset) {
  check_samples(samples);
  const int K = static_cast<int>(samples.size());
  const int W = samples[0].width, H = samples[0].height;
  const std::vector<int> cands = palette_subset(palette, subset);
  SegAggregate out{std::vector<int>(static_cast<size_t>(W) * H, kBackground), FloatMap(W, H)};
  // slot 0 = background, slot p+1 = part p
  std::vector<int> counts(static_cast<size_t>(palette.size()) + 1, 0);
  std::vector<int> touched;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      touched.clear();
      for (int k = 0; k < K; ++k) {
        const Rgb c = samples[k].at(x, y);
        const int label = c == Rgb{0, 0, 0} ? kBackground : quantize_color(c, palette, cands);
        const int slot = label + 1;
        if (counts[slot]++ == 0) touched.push_back(slot);
      }
      int n_max = 0;
      for (int s : touched) n_max = std::max(n_max, counts[s]);
      int winner = palette.size() + 1;
      for (int s : touched)
        if (counts[s] == n_max) winner = std::min(winner, s);  // slot 0 (background) first, then lowest part id
      for (int s : touched) counts[s] = 0;
      out.labels[static_cast<size_t>(y) * W + x] = winner - 1;
      out.u_seg.at(x, y) = static_cast<float>(seg_uncertainty(n_max, K));
    }
  }
  return out;
}

FloatMap weight_map(const FloatMap& u_uv, const FloatMap& u_seg) {
  if (u_uv.width != u_seg.width || u_uv.height != u_seg.height) throw Error("uncertainty maps differ in size");
  FloatMap w(u_uv.width, u_uv.height);
  for (size_t i = 0; i < w.data.size(); ++i) {
    const double uu = std::clamp(static_cast<double>(u_uv.data[i]), 0.0, 1.0);
    w.data[i] = static_cast<float>((1.0 - uu) * (1.0 - static_cast<double>(u_seg.data[i])));
  }
  return w;
}

AggregatedProxy aggregate(std::span<const Proxy> samples, const Palette& palette, PaletteSubset subset) {
  if (samples.empty()) throw Error("aggregation needs at least one sample (K = 0)");
  std::vector<RgbImage> segs, uvs;
  segs.reserve(samples.size());
  uvs.reserve(samples.size());
  for (const Proxy& p : samples) {
    segs.push_back(p.seg);
    uvs.push_back(p.uv);
  }
  UvAggregate ua = aggregate_uv(uvs);
  SegAggregate sa = aggregate_seg(segs, palette, subset);
  AggregatedProxy out;
  out.width = samples[0].seg.width;
  out.height = samples[0].seg.height;
  out.k = static_cast<int>(samples.size());
  out.seg_hat = std::move(sa.labels);
  out.uv_hat = std::move(ua.uv_hat);
  out.weight = weight_map(ua.u_uv, sa.u_seg);
  out.u_uv = std::move(ua.u_uv);
  out.u_seg = std::move(sa.u_seg);
  return out;
}

RgbImage seg_image(const AggregatedProxy& agg, const Palette& palette) {
  RgbImage img(agg.width, agg.height);
  for (int y = 0; y < agg.height; ++y)
    for (int x = 0; x < agg.width; ++x) img.set(x, y, palette.color(agg.label(x, y)));
  return img;
}

void write_aggregated(const AggregatedProxy& agg, const Palette& palette, const std::string& dir, const std::string& stem) {
  const std::string base = dir + "/" + stem;
  write_png(base + "_seg.png", seg_image(agg, palette));
  write_png(base + "_uv.png", agg.uv_hat);
  write_float_maps(base + "_maps.bin", base + "_maps.json", {{"u_uv", &agg.u_uv}, {"u_seg", &agg.u_seg}, {"weight", &agg.weight}});
}

AggregatedProxy read_aggregated(const Palette& palette, const std::string& dir, const std::string& stem, PaletteSubset subset) {
  const std::string base = dir + "/" + stem;
  AggregatedProxy agg;
  const RgbImage seg = read_png(base + "_seg.png");
  agg.uv_hat = read_png(base + "_uv.png");
  agg.width = seg.width;
  agg.height = seg.height;
  const std::vector<int> cands = palette_subset(palette, subset);
  agg.seg_hat.resize(static_cast<size_t>(seg.width) * seg.height);
  for (int y = 0; y < seg.height; ++y)
    for (int x = 0; x < seg.width; ++x) {
      const Rgb c = seg.at(x, y);
      agg.seg_hat[static_cast<size_t>(y) * seg.width + x] = c == Rgb{0, 0, 0} ? kBackground : quantize_color(c, palette, cands);
    }
  for (auto& [name, map] : read_float_maps(base + "_maps.bin", base + "_maps.json")) {
    if (name == "u_uv") agg.u_uv = std::move(map);
    else if (name == "u_seg") agg.u_seg = std::move(map);
    else if (name == "weight") agg.weight = std::move(map);
  }
  if (agg.weight.width != agg.width || agg.u_uv.width != agg.width || agg.u_seg.width != agg.width)
    throw ParseError("aggregated maps missing or mis-sized for " + base);
  return agg;
}

}  // namespace proxyfit
