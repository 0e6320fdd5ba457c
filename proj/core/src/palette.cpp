#include "proxyfit/proxy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json_util.hpp"

namespace proxyfit {

using detail::json;

Palette make_palette(const BodyModel& model) {
  static constexpr std::uint8_t kLevels[5] = {40, 88, 136, 184, 232};
  // Body parts walk the lattice from one end, hand parts from the other, so
  // the two subsets stay far apart.
  std::vector<Rgb> lattice;
  for (int r = 0; r < 5; ++r)
    for (int g = 0; g < 5; ++g)
      for (int b = 0; b < 5; ++b) lattice.push_back({kLevels[r], kLevels[(g + 2 * r) % 5], kLevels[(b + 3 * g + r) % 5]});
  if (model.num_parts() > static_cast<int>(lattice.size())) throw ValidationError("too many parts for the palette lattice");
  Palette pal;
  int front = 0, back = static_cast<int>(lattice.size()) - 1;
  for (const Part& p : model.parts) {
    PaletteEntry e{p.name, p.hand ? lattice[back--] : lattice[front++], p.mirror, p.hand, p.side, p.region};
    pal.entries.push_back(e);
  }
  validate_palette(pal);
  return pal;
}

void validate_palette(const Palette& palette) {
  for (int a = 0; a < palette.size(); ++a) {
    const Rgb& ca = palette.entries[a].color;
    if (ca == Rgb{0, 0, 0}) throw ValidationError("palette entry '" + palette.entries[a].name + "' reuses the background colour");
    for (int b = a + 1; b < palette.size(); ++b) {
      const Rgb& cb = palette.entries[b].color;
      int linf = 0;
      for (int c = 0; c < 3; ++c) linf = std::max(linf, std::abs(int(ca[c]) - int(cb[c])));
      if (linf < 24)
        throw ValidationError("palette entries '" + palette.entries[a].name + "' and '" + palette.entries[b].name + "' are too close");
    }
    const int m = palette.entries[a].mirror;
    if (m >= palette.size()) throw ValidationError("palette mirror out of range");
  }
}

std::vector<int> palette_subset(const Palette& palette, PaletteSubset subset) {
  std::vector<int> out;
  for (int i = 0; i < palette.size(); ++i) {
    const bool hand = palette.entries[i].hand;
    if (subset == PaletteSubset::kAll || (subset == PaletteSubset::kHand) == hand) out.push_back(i);
  }
  return out;
}

std::string palette_to_json(const Palette& palette) {
  json arr = json::array();
  for (int i = 0; i < palette.size(); ++i) {
    const PaletteEntry& e = palette.entries[i];
    arr.push_back({{"part", i}, {"name", e.name}, {"rgb", {e.color[0], e.color[1], e.color[2]}}, {"mirror", e.mirror},
                   {"hand", e.hand}, {"side", std::string(to_string(e.side))}, {"region", e.region}});
  }
  return json{{"format", "proxyfit-palette"}, {"background", {0, 0, 0}}, {"entries", arr}}.dump(1);
}

Palette palette_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed palette: ") + e.what());
  }
  Palette pal = detail::parse_guard("malformed palette", [&] {
    Palette p;
    for (const json& e : j.at("entries")) {
      const auto rgb = e.at("rgb").get<std::array<int, 3>>();
      PaletteEntry entry{e.at("name").get<std::string>(),
                         {static_cast<std::uint8_t>(rgb[0]), static_cast<std::uint8_t>(rgb[1]), static_cast<std::uint8_t>(rgb[2])},
                         e.at("mirror").get<int>(), e.at("hand").get<bool>(), parse_side(e.at("side").get<std::string>()),
                         e.at("region").get<std::string>()};
      if (e.at("part").get<int>() != p.size()) throw ParseError("palette entries must be ordered by part id");
      p.entries.push_back(entry);
    }
    return p;
  });
  validate_palette(pal);
  return pal;
}

void save_palette(const Palette& palette, const std::string& path) {
  detail::write_text_file(path, palette_to_json(palette) + "\n");
}

Palette load_palette(const std::string& path) { return palette_from_json(detail::read_json_file(path).dump()); }

Rgb encode_uv(const Vec2& uv) {
  auto q = [](double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  return {q(uv.x()), q(uv.y()), 255};
}

Vec2 decode_uv(const Rgb& rgb) { return Vec2(rgb[0] / 255.0, rgb[1] / 255.0); }

int quantize_color(const Rgb& color, const Palette& palette, const std::vector<int>& candidates, double threshold) {
  auto dist2 = [&](const Rgb& c) {
    int d = 0;
    for (int k = 0; k < 3; ++k) {
      const int e = int(color[k]) - int(c[k]);
      d += e * e;
    }
    return d;
  };
  int best = kBackground;
  int best_d = dist2({0, 0, 0});
  for (int part : candidates) {  // candidates are ascending
    const int d = dist2(palette.entries[part].color);
    if (d < best_d) {
      best_d = d;
      best = part;
    }
  }
  if (best == kBackground || static_cast<double>(best_d) > threshold * threshold) return kBackground;
  return best;
}

PixelDecode decode_pixel(const Proxy& proxy, int x, int y, const Palette& palette, PaletteSubset subset, double threshold) {
  PixelDecode out;
  const std::vector<int> cands = palette_subset(palette, subset);
  out.part = quantize_color(proxy.seg.at(x, y), palette, cands, threshold);
  out.valid = out.part != kBackground;
  if (out.valid) out.uv = decode_uv(proxy.uv.at(x, y));
  return out;
}

Vec2 barycentric_uv(const Vec3& w, const std::array<Vec2, 3>& uv) {
  constexpr double kTol = 1e-9;
  if (!(w.minCoeff() >= -kTol) || std::abs(w.sum() - 1.0) > kTol) throw Error("barycentric weights outside the simplex");
  return w[0] * uv[0] + w[1] * uv[1] + w[2] * uv[2];
}

HandBoxes hand_bboxes(const Proxy& proxy, const Palette& palette, double enlarge, int min_pixels) {
  const std::vector<int> cands = palette_subset(palette, PaletteSubset::kAll);
  struct Acc {
    int n = 0;
    int x0 = std::numeric_limits<int>::max(), y0 = std::numeric_limits<int>::max(), x1 = -1, y1 = -1;
  } acc[2];
  const RgbImage& seg = proxy.seg;
  for (int y = 0; y < seg.height; ++y) {
    for (int x = 0; x < seg.width; ++x) {
      const Rgb c = seg.at(x, y);
      if (c == Rgb{0, 0, 0}) continue;
      const int part = quantize_color(c, palette, cands);
      if (part == kBackground || !palette.entries[part].hand) continue;
      const Side side = palette.entries[part].side;
      if (side == Side::kCenter) continue;
      Acc& a = acc[side == Side::kLeft ? 0 : 1];
      ++a.n;
      a.x0 = std::min(a.x0, x);
      a.y0 = std::min(a.y0, y);
      a.x1 = std::max(a.x1, x);
      a.y1 = std::max(a.y1, y);
    }
  }
  HandBoxes out;
  for (int s = 0; s < 2; ++s) {
    if (acc[s].n < min_pixels) continue;
    const PixelRect tight{double(acc[s].x0), double(acc[s].y0), double(acc[s].x1 - acc[s].x0 + 1), double(acc[s].y1 - acc[s].y0 + 1)};
    (s == 0 ? out.left : out.right) = enlarge_box(tight, enlarge, seg.width, seg.height);
  }
  return out;
}

}  // namespace proxyfit
