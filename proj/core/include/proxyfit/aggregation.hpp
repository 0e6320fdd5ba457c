#pragma once

#include <span>
#include <string>
#include <vector>

#include "proxyfit/image.hpp"
#include "proxyfit/proxy.hpp"

namespace proxyfit {

struct UvAggregate {
  RgbImage uv_hat;  // per-channel median of the encoded samples
  FloatMap u_uv;    // mean over the 3 channels of the population variance, channels scaled to [0,1]
};

struct SegAggregate {
  std::vector<int> labels;  // majority label per pixel, kBackground allowed
  FloatMap u_seg;
};

// K samples of a view collapsed into one robust proxy with uncertainty.
struct AggregatedProxy {
  int width = 0;
  int height = 0;
  int k = 0;
  std::vector<int> seg_hat;
  RgbImage uv_hat;
  FloatMap u_uv;
  FloatMap u_seg;
  FloatMap weight;

  int label(int x, int y) const { return seg_hat[static_cast<size_t>(y) * width + x]; }
  Vec2 uv(int x, int y) const { return decode_uv(uv_hat.at(x, y)); }
};

// Even K takes the lower-middle order statistic. Throws Error when K = 0
// or shapes differ.
UvAggregate aggregate_uv(std::span<const RgbImage> samples);

// Samples are quantised against `subset`; background votes like any label.
// Ties: background wins, then the lowest part id.
SegAggregate aggregate_seg(std::span<const RgbImage> samples, const Palette& palette, PaletteSubset subset);

// 1 if n_max <= K/2, else 2 (1 - n_max / K).
double seg_uncertainty(int n_max, int k);

// (1 - clamp(u_uv, 0, 1)) * (1 - u_seg)
FloatMap weight_map(const FloatMap& u_uv, const FloatMap& u_seg);

AggregatedProxy aggregate(std::span<const Proxy> samples, const Palette& palette, PaletteSubset subset);

// seg_hat rendered back to palette colours.
RgbImage seg_image(const AggregatedProxy& agg, const Palette& palette);

// <dir>/<stem>_seg.png, <stem>_uv.png, <stem>_maps.bin + <stem>_maps.json
void write_aggregated(const AggregatedProxy& agg, const Palette& palette, const std::string& dir, const std::string& stem);
AggregatedProxy read_aggregated(const Palette& palette, const std::string& dir, const std::string& stem, PaletteSubset subset);

}  // namespace proxyfit
