#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "proxyfit/proxy.hpp"

namespace proxyfit {

// Stochastic proxy corruption standing in for sampler variability.
struct CorruptionSpec {
  double uv_sigma = 0.0;          // additive Gaussian on decoded uv, [0,1] units
  double label_flip_prob = 0.0;   // per pixel: label -> left/right mirror
  double region_flip_prob = 0.0;  // per sample: mirror every label of one limb region
  double dropout_prob = 0.0;      // per pixel: foreground -> background
  std::uint64_t seed = 0;

  bool is_identity() const {
    return uv_sigma == 0.0 && label_flip_prob == 0.0 && region_flip_prob == 0.0 && dropout_prob == 0.0;
  }
  bool operator==(const CorruptionSpec&) const = default;
};

// Throws ValidationError for probabilities outside [0,1] or negative sigma.
void validate_corruption(const CorruptionSpec& spec);

// Regions eligible for region flips: sided regions whose parts all have a
// mirror (limbs and hands), sorted by name.
std::vector<std::string> flippable_regions(const Palette& palette);

// Recolours every pixel of `region` with its mirrored part; uv untouched.
Proxy flip_region(const Proxy& proxy, const Palette& palette, const std::string& region);

// Independent corruption per (spec.seed, view, sample_index). The flipped
// region is drawn once per (seed, view) so repeated samples of one view
// disagree about the same limb; whether a sample flips it is drawn per
// sample. Labels are decoded against `subset`.
Proxy corrupt(const Proxy& proxy, const Palette& palette, const CorruptionSpec& spec, int view, int sample_index,
              PaletteSubset subset = PaletteSubset::kAll);

}  // namespace proxyfit
