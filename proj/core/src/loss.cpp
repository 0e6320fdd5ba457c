#include "proxyfit/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "proxyfit/error.hpp"

namespace proxyfit {

Camera apply_delta(const Camera& cam, const CameraDelta& delta) {
  Camera out = cam;
  out.R = rodrigues(delta.omega) * cam.R;
  out.t = cam.t + delta.t;
  return out;
}

namespace {

int num_rigs(std::span<const FitView> views) {
  int n = 0;
  for (const FitView& v : views) n = std::max(n, v.rig + 1);
  return n;
}

std::vector<Camera> posed_cameras(std::span<const FitView> views, std::span<const CameraDelta> deltas) {
  std::vector<Camera> cams;
  cams.reserve(views.size());
  for (const FitView& v : views) {
    if (deltas.empty()) {
      cams.push_back(v.camera);
    } else {
      if (v.rig < 0 || v.rig >= static_cast<int>(deltas.size())) throw Error("view references a missing rig camera");
      cams.push_back(apply_delta(v.camera, deltas[v.rig]));
    }
  }
  return cams;
}

Vec3 surface_point(const Points3& verts, const BodyModel& model, const Correspondence& c) {
  const auto& f = model.faces[c.face];
  return c.bary[0] * verts.row(f[0]).transpose() + c.bary[1] * verts.row(f[1]).transpose() +
         c.bary[2] * verts.row(f[2]).transpose();
}

}  // namespace

LossResult reprojection_loss(const BodyModel& model, const PoseParams& params, std::span<const FitView> views,
                             std::span<const CameraDelta> deltas, std::span<const Correspondence> corrs,
                             const LossOptions& options, bool with_gradient) {
  check_params(model, params);
  const int rigs = num_rigs(views);
  if (!deltas.empty() && static_cast<int>(deltas.size()) < rigs) throw Error("one camera delta per rig camera required");
  const std::vector<Camera> cams = posed_cameras(views, deltas);

  SkinningState state = forward_state(model, params);
  const Points3& verts = state.mesh.vertices;
  Points3 grad_v;
  if (with_gradient) grad_v = Points3::Zero(verts.rows(), 3);

  LossResult out;
  out.camera_grad.assign(deltas.empty() ? 0 : deltas.size(), CameraDelta{});
  std::vector<std::array<Mat3, 3>> rig_jac;
  if (with_gradient && !deltas.empty()) {
    rig_jac.reserve(deltas.size());
    for (const CameraDelta& d : deltas) rig_jac.push_back(rodrigues_jacobian(d.omega));
  }

  const double eps = options.hinge_eps;
  const double kappa = options.hinge_kappa;
  const double delta = options.huber_scale;
  double total = 0.0;
  for (size_t i = 0; i < corrs.size(); ++i) {
    const Correspondence& c = corrs[i];
    if (c.weight == 0.0) continue;
    if (c.view < 0 || c.view >= static_cast<int>(views.size()) || c.face < 0 || c.face >= model.num_faces())
      throw Error("correspondence " + std::to_string(i) + " references a missing view or face");
    const Camera& cam = cams[c.view];
    const Vec3 X = surface_point(verts, model, c);
    const Vec3 Xc = cam.R * X + cam.t;
    double term;
    Vec3 g_xc = Vec3::Zero();  // dterm/dXc
    if (Xc.z() < eps) {
      const double gap = eps - Xc.z();
      term = c.weight * kappa * gap * gap;
      g_xc.z() = -2.0 * c.weight * kappa * gap;
      ++out.behind;
    } else {
      const double iz = 1.0 / Xc.z();
      const Vec2 r(cam.fx * Xc.x() * iz + cam.cx - c.pixel.x(), cam.fy * Xc.y() * iz + cam.cy - c.pixel.y());
      const double d2 = r.squaredNorm();
      Vec2 g_r;
      if (delta > 0.0 && d2 > delta * delta) {
        const double d = std::sqrt(d2);
        term = c.weight * (2.0 * delta * d - delta * delta);
        g_r = c.weight * 2.0 * delta / d * r;
      } else {
        term = c.weight * d2;
        g_r = 2.0 * c.weight * r;
      }
      g_xc.x() = g_r.x() * cam.fx * iz;
      g_xc.y() = g_r.y() * cam.fy * iz;
      g_xc.z() = -(g_r.x() * cam.fx * Xc.x() + g_r.y() * cam.fy * Xc.y()) * iz * iz;
    }
    if (!std::isfinite(term)) {
      if (out.first_bad < 0) out.first_bad = static_cast<int>(i);
      total = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    total += term;
    if (!with_gradient) continue;
    const Vec3 g_x = cam.R.transpose() * g_xc;
    const auto& f = model.faces[c.face];
    for (int k = 0; k < 3; ++k) grad_v.row(f[k]) += c.bary[k] * g_x.transpose();
    if (!deltas.empty()) {
      // Xc = rodrigues(omega) R0 X + t0 + t  =>  dXc/domega_k = J_k R0 X
      const int r = views[c.view].rig;
      const Vec3 x0 = views[c.view].camera.R * X;
      for (int k = 0; k < 3; ++k) out.camera_grad[r].omega[k] += g_xc.dot(rig_jac[r][k] * x0);
      out.camera_grad[r].t += g_xc;
    }
  }

  if (options.pose_prior > 0.0) total += options.pose_prior * params.theta.squaredNorm();
  out.value = total;
  if (with_gradient) {
    out.grad = backward(model, params, state, grad_v);
    if (options.pose_prior > 0.0) out.grad.theta += 2.0 * options.pose_prior * params.theta;
  }
  return out;
}

std::vector<Projection> project_correspondences(const BodyModel& model, const PoseParams& params,
                                                std::span<const FitView> views, std::span<const CameraDelta> deltas,
                                                std::span<const Correspondence> corrs) {
  const std::vector<Camera> cams = posed_cameras(views, deltas);
  const PosedMesh mesh = forward(model, params);
  std::vector<Projection> out;
  out.reserve(corrs.size());
  for (const Correspondence& c : corrs) out.push_back(project(cams[c.view], surface_point(mesh.vertices, model, c)));
  return out;
}

std::vector<double> residuals(const BodyModel& model, const PoseParams& params, std::span<const FitView> views,
                              std::span<const CameraDelta> deltas, std::span<const Correspondence> corrs) {
  const std::vector<Projection> proj = project_correspondences(model, params, views, deltas, corrs);
  std::vector<double> out;
  out.reserve(corrs.size());
  for (size_t i = 0; i < corrs.size(); ++i)
    out.push_back(proj[i].in_front ? (proj[i].pixel - corrs[i].pixel).norm() : std::numeric_limits<double>::quiet_NaN());
  return out;
}

}  // namespace proxyfit
