#include "proxyfit/correspondence.hpp"

#include <string>

#include "proxyfit/error.hpp"

namespace proxyfit {

std::string_view to_string(ViewKind kind) {
  switch (kind) {
    case ViewKind::kBody: return "body";
    case ViewKind::kHandLeft: return "hand_left";
    case ViewKind::kHandRight: return "hand_right";
  }
  return "body";
}

ViewKind parse_view_kind(std::string_view name) {
  if (name == "body") return ViewKind::kBody;
  if (name == "hand_left") return ViewKind::kHandLeft;
  if (name == "hand_right") return ViewKind::kHandRight;
  throw ParseError("unknown view kind '" + std::string(name) + "'");
}

std::vector<Correspondence> extract_correspondences(std::span<const AggregatedProxy> views,
                                                    std::span<const ViewKind> kinds, const UvIndex& index,
                                                    const BodyModel& model, const CorrespondenceOptions& options) {
  if (views.size() != kinds.size()) throw Error("one view kind per aggregated view required");
  std::vector<Correspondence> out;
  for (size_t v = 0; v < views.size(); ++v) {
    const AggregatedProxy& agg = views[v];
    const bool hand_view = kinds[v] != ViewKind::kBody;
    const Side crop_side = kinds[v] == ViewKind::kHandLeft ? Side::kLeft : Side::kRight;
    for (int y = 0; y < agg.height; ++y) {
      for (int x = 0; x < agg.width; ++x) {
        const int part = agg.label(x, y);
        if (part == kBackground || part >= model.num_parts()) continue;
        if (hand_view && (!model.parts[part].hand || model.parts[part].side != crop_side)) continue;
        if (agg.uv_hat.at(x, y)[2] < 128) continue;  // uv samples mostly background here
        double w = 1.0;
        if (options.use_weights) {
          w = agg.weight.at(x, y);
          if (w < options.w_min) continue;
        }
        const auto hit = index.lookup_nearest(part, agg.uv(x, y), options.uv_tolerance);
        if (!hit) continue;
        Vec3 b = hit->bary.cwiseMax(0.0);
        b /= b.sum();
        out.push_back({static_cast<int>(v), Vec2(x + 0.5, y + 0.5), hit->face, b, w, part});
      }
    }
  }
  return out;
}

}  // namespace proxyfit
