#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "proxyfit/aggregation.hpp"
#include "proxyfit/body_model.hpp"
#include "proxyfit/camera.hpp"
#include "proxyfit/uv_index.hpp"

namespace proxyfit {

enum class ViewKind { kBody, kHandLeft, kHandRight };

std::string_view to_string(ViewKind kind);
ViewKind parse_view_kind(std::string_view name);

// One image the fitter sees. Hand crops share the extrinsics of their rig
// camera `rig`, so refining rig camera r moves every view with rig == r.
struct FitView {
  Camera camera;
  int rig = 0;
  ViewKind kind = ViewKind::kBody;
};

struct Correspondence {
  int view = 0;
  Vec2 pixel = Vec2::Zero();  // pixel centre
  int face = -1;
  Vec3 bary = Vec3::Zero();
  double weight = 1.0;
  int part = -1;
};

struct CorrespondenceOptions {
  double w_min = 0.02;
  bool use_weights = true;           // false: every pixel weight 1, nothing dropped for low weight
  double uv_tolerance = 1.5 / 255.0;  // snap distance for uvs that miss every triangle after quantisation
};

// One correspondence per usable foreground pixel, views in order, pixels in
// raster order. Hand-crop views keep pixels of their own hand only.
std::vector<Correspondence> extract_correspondences(std::span<const AggregatedProxy> views,
                                                    std::span<const ViewKind> kinds, const UvIndex& index,
                                                    const BodyModel& model, const CorrespondenceOptions& options = {});

}  // namespace proxyfit
