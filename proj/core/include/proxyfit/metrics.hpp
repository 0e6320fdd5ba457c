#pragma once

#include <optional>
#include <vector>

#include "proxyfit/body_model.hpp"

namespace proxyfit {

struct Similarity {
  double s = 1.0;
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  Points3 apply(const Points3& pts) const;
};

// Similarity minimising sum |s R x_i + t - y_i|^2 with R a proper rotation.
// Throws ValidationError for count mismatch, fewer than 3 points or a
// (near-)collinear X.
Similarity procrustes_align(const Points3& X, const Points3& Y);

// Mean squared residual of `T` applied to X against Y.
double alignment_residual(const Similarity& T, const Points3& X, const Points3& Y);

struct MetricReport {
  double mpjpe = 0.0;
  double pa_mpjpe = 0.0;
  double mpvpe = 0.0;
  double pa_mpvpe = 0.0;
};

// Restricts the metrics to some joints / vertices (e.g. the hands).
struct MetricSubset {
  std::vector<int> joints;
  std::vector<int> vertices;
};

MetricSubset hand_subset(const BodyModel& model);

// MPJPE/MPVPE after translating pred so its root joint (0) meets gt's;
// PA variants use the similarity fitted on the (subset) joints, also applied
// to the vertices. Throws ValidationError on topology mismatch.
MetricReport joint_and_vertex_errors(const PosedMesh& pred, const PosedMesh& gt,
                                     const std::optional<MetricSubset>& subset = std::nullopt);

}  // namespace proxyfit
