#pragma once

#include <optional>
#include <string>
#include <vector>

#include "proxyfit/body_model.hpp"
#include "proxyfit/camera.hpp"
#include "proxyfit/image.hpp"

namespace proxyfit {

inline constexpr int kBackground = -1;
inline constexpr int kProxySize = 256;
inline constexpr double kDefaultDecodeThreshold = 40.0;

struct PaletteEntry {
  std::string name;
  Rgb color{};
  int mirror = -1;
  bool hand = false;
  Side side = Side::kCenter;
  std::string region;

  bool operator==(const PaletteEntry&) const = default;
};

// Part id -> colour table. Background is (0,0,0) and never reused.
struct Palette {
  std::vector<PaletteEntry> entries;  // indexed by part id

  int size() const { return static_cast<int>(entries.size()); }
  Rgb color(int part) const { return part == kBackground ? Rgb{0, 0, 0} : entries[part].color; }
  bool operator==(const Palette&) const = default;
};

enum class PaletteSubset { kAll, kBody, kHand };

// Colours from a 5-level RGB lattice (channel step 48), so any two entries
// are >= 48 apart in every norm.
Palette make_palette(const BodyModel& model);

// Distinct colours (min L-inf distance >= 24), none equal to background.
void validate_palette(const Palette& palette);

std::vector<int> palette_subset(const Palette& palette, PaletteSubset subset);

std::string palette_to_json(const Palette& palette);
Palette palette_from_json(const std::string& text);
void save_palette(const Palette& palette, const std::string& path);
Palette load_palette(const std::string& path);

// Segmentation + uv image pair. uv encodes u -> R, v -> G (x255, rounded)
// and B = 255 on foreground; background is (0,0,0) in both.
struct Proxy {
  RgbImage seg;
  RgbImage uv;

  bool operator==(const Proxy&) const = default;
};

struct PixelDecode {
  int part = kBackground;
  Vec2 uv = Vec2::Zero();
  bool valid = false;
};

Rgb encode_uv(const Vec2& uv);
Vec2 decode_uv(const Rgb& rgb);

// Nearest palette colour (L2 in RGB) among `candidates` and background.
// Returns kBackground when background is nearest or the distance exceeds
// `threshold`. Ties go to background, then to the lowest part id.
int quantize_color(const Rgb& color, const Palette& palette, const std::vector<int>& candidates,
                   double threshold = kDefaultDecodeThreshold);

PixelDecode decode_pixel(const Proxy& proxy, int x, int y, const Palette& palette,
                         PaletteSubset subset = PaletteSubset::kAll, double threshold = kDefaultDecodeThreshold);

// u = la*ua + lb*ub + lc*uc. Throws Error when the weights are outside
// the simplex (tolerance 1e-9).
Vec2 barycentric_uv(const Vec3& weights, const std::array<Vec2, 3>& corner_uvs);

struct HandBoxes {
  std::optional<PixelRect> left;
  std::optional<PixelRect> right;
};

// Tight box over each hand's pixels, enlarged by `enlarge` (square, clamped
// to the image). A hand with fewer than `min_pixels` pixels is absent.
HandBoxes hand_bboxes(const Proxy& proxy, const Palette& palette, double enlarge = 2.2, int min_pixels = 8);

}  // namespace proxyfit
