#pragma once

#include <span>
#include <vector>

#include "proxyfit/body_model.hpp"
#include "proxyfit/camera.hpp"
#include "proxyfit/correspondence.hpp"

namespace proxyfit {

// Update applied to a rig camera: R = rodrigues(omega) * R0, t = t0 + t.
struct CameraDelta {
  Vec3 omega = Vec3::Zero();
  Vec3 t = Vec3::Zero();
};

Camera apply_delta(const Camera& cam, const CameraDelta& delta);

struct LossOptions {
  double huber_scale = 0.0;   // pixels; 0 = plain squared distance
  double hinge_kappa = 1e4;
  double hinge_eps = 1e-3;    // depth below which the hinge replaces the projection
  double pose_prior = 0.0;    // lambda * |theta|^2
};

struct LossResult {
  double value = 0.0;
  PoseParams grad;                       // PoseParams layout
  std::vector<CameraDelta> camera_grad;  // per rig camera
  int behind = 0;                        // correspondences handled by the hinge
  int first_bad = -1;                    // first correspondence with a non-finite term
};

// Sum over correspondences of w * d^2 (or w * huber(d)), where d is the
// pixel distance between the projected surface point and the pixel centre.
// Points with depth < hinge_eps contribute w * kappa * (eps - z)^2 instead.
// `deltas` has one entry per rig camera (empty = all zero).
LossResult reprojection_loss(const BodyModel& model, const PoseParams& params, std::span<const FitView> views,
                             std::span<const CameraDelta> deltas, std::span<const Correspondence> corrs,
                             const LossOptions& options = {}, bool with_gradient = true);

// Projection of each correspondence's surface point into its view.
std::vector<Projection> project_correspondences(const BodyModel& model, const PoseParams& params,
                                                std::span<const FitView> views, std::span<const CameraDelta> deltas,
                                                std::span<const Correspondence> corrs);

// Per-correspondence pixel residual d (NaN for points behind the camera).
std::vector<double> residuals(const BodyModel& model, const PoseParams& params, std::span<const FitView> views,
                              std::span<const CameraDelta> deltas, std::span<const Correspondence> corrs);

}  // namespace proxyfit
