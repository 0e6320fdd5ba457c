#include "proxyfit/corruption.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "proxyfit/error.hpp"
#include "proxyfit/seeding.hpp"

namespace proxyfit {

void validate_corruption(const CorruptionSpec& spec) {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string(name) + " must be in [0,1]");
  };
  prob(spec.label_flip_prob, "label_flip_prob");
  prob(spec.region_flip_prob, "region_flip_prob");
  prob(spec.dropout_prob, "dropout_prob");
  if (!(spec.uv_sigma >= 0.0)) throw ValidationError("uv_sigma must be >= 0");
}

std::vector<std::string> flippable_regions(const Palette& palette) {
  std::set<std::string> regions, blocked;
  for (const PaletteEntry& e : palette.entries) {
    if (e.side == Side::kCenter) continue;
    (e.mirror >= 0 ? regions : blocked).insert(e.region);
  }
  std::vector<std::string> out;
  for (const std::string& r : regions)
    if (!blocked.count(r) && (r.rfind("left_", 0) == 0 || r.rfind("right_", 0) == 0)) out.push_back(r);
  return out;
}

namespace {

std::vector<int> decode_labels(const Proxy& proxy, const Palette& palette, PaletteSubset subset) {
  const std::vector<int> cands = palette_subset(palette, subset);
  const RgbImage& seg = proxy.seg;
  std::vector<int> labels(static_cast<size_t>(seg.width) * seg.height, kBackground);
  for (int y = 0; y < seg.height; ++y)
    for (int x = 0; x < seg.width; ++x) {
      const Rgb c = seg.at(x, y);
      if (c != Rgb{0, 0, 0}) labels[static_cast<size_t>(y) * seg.width + x] = quantize_color(c, palette, cands);
    }
  return labels;
}

}  // namespace

Proxy flip_region(const Proxy& proxy, const Palette& palette, const std::string& region) {
  Proxy out = proxy;
  const std::vector<int> labels = decode_labels(proxy, palette, PaletteSubset::kAll);
  for (int y = 0; y < proxy.seg.height; ++y)
    for (int x = 0; x < proxy.seg.width; ++x) {
      const int part = labels[static_cast<size_t>(y) * proxy.seg.width + x];
      if (part == kBackground) continue;
      const PaletteEntry& e = palette.entries[part];
      if (e.region == region && e.mirror >= 0) out.seg.set(x, y, palette.color(e.mirror));
    }
  return out;
}

Proxy corrupt(const Proxy& proxy, const Palette& palette, const CorruptionSpec& spec, int view, int sample_index,
              PaletteSubset subset) {
  validate_corruption(spec);
  if (spec.is_identity()) return proxy;

  const int W = proxy.seg.width, H = proxy.seg.height;
  std::vector<int> labels = decode_labels(proxy, palette, subset);

  if (spec.region_flip_prob > 0.0) {
    const std::vector<std::string> regions = flippable_regions(palette);
    if (!regions.empty()) {
      std::mt19937_64 view_rng(stream_seed(spec.seed, {0x7265676eULL, static_cast<std::uint64_t>(view)}));
      const std::string& region = regions[std::uniform_int_distribution<size_t>(0, regions.size() - 1)(view_rng)];
      std::mt19937_64 sample_rng(
          stream_seed(spec.seed, {0x666c6970ULL, static_cast<std::uint64_t>(view), static_cast<std::uint64_t>(sample_index)}));
      if (std::uniform_real_distribution<double>(0.0, 1.0)(sample_rng) < spec.region_flip_prob) {
        for (int& l : labels)
          if (l != kBackground && palette.entries[l].region == region && palette.entries[l].mirror >= 0) l = palette.entries[l].mirror;
      }
    }
  }

  std::mt19937_64 rng(stream_seed(spec.seed, {0x706978ULL, static_cast<std::uint64_t>(view), static_cast<std::uint64_t>(sample_index)}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, spec.uv_sigma > 0.0 ? spec.uv_sigma : 1.0);

  Proxy out{RgbImage(W, H), RgbImage(W, H)};
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      int label = labels[static_cast<size_t>(y) * W + x];
      if (label == kBackground) continue;
      if (spec.label_flip_prob > 0.0 && unit(rng) < spec.label_flip_prob && palette.entries[label].mirror >= 0)
        label = palette.entries[label].mirror;
      if (spec.dropout_prob > 0.0 && unit(rng) < spec.dropout_prob) continue;
      Vec2 uv = decode_uv(proxy.uv.at(x, y));
      if (spec.uv_sigma > 0.0) {
        uv.x() = std::clamp(uv.x() + normal(rng), 0.0, 1.0);
        uv.y() = std::clamp(uv.y() + normal(rng), 0.0, 1.0);
      }
      out.seg.set(x, y, palette.color(label));
      out.uv.set(x, y, encode_uv(uv));
    }
  }
  return out;
}

}  // namespace proxyfit
