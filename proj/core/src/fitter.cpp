#include "proxyfit/fitter.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "proxyfit/error.hpp"

namespace proxyfit {

std::string_view to_string(Block block) {
  switch (block) {
    case Block::kGlobalRot: return "global_rot";
    case Block::kTranslation: return "translation";
    case Block::kScale: return "scale";
    case Block::kBodyPose: return "body_pose";
    case Block::kWristPose: return "wrist_pose";
    case Block::kShape: return "shape";
    case Block::kHandPose: return "hand_pose";
    case Block::kCameras: return "cameras";
  }
  return "unknown";
}

Block parse_block(std::string_view name) {
  for (Block b : {Block::kGlobalRot, Block::kTranslation, Block::kScale, Block::kBodyPose, Block::kWristPose, Block::kShape,
                  Block::kHandPose, Block::kCameras})
    if (to_string(b) == name) return b;
  throw ParseError("unknown parameter block '" + std::string(name) + "'");
}

std::string_view to_string(StageData data) {
  switch (data) {
    case StageData::kBody: return "body";
    case StageData::kHand: return "hand";
    case StageData::kAll: return "all";
  }
  return "unknown";
}

StageData parse_stage_data(std::string_view name) {
  for (StageData d : {StageData::kBody, StageData::kHand, StageData::kAll})
    if (to_string(d) == name) return d;
  throw ParseError("unknown stage data '" + std::string(name) + "'");
}

std::vector<StageSpec> default_stages() {
  return {
      {"global", {Block::kGlobalRot, Block::kTranslation}, StageData::kBody},
      {"scale", {Block::kScale}, StageData::kBody},
      {"body_pose", {Block::kBodyPose}, StageData::kBody},
      {"body_pose_shape", {Block::kBodyPose, Block::kShape}, StageData::kBody},
      {"wrists", {Block::kWristPose}, StageData::kHand},
      {"hands", {Block::kHandPose}, StageData::kHand},
  };
}

std::vector<StageSpec> extended_stages() {
  std::vector<StageSpec> s = default_stages();
  s.push_back({"joint_body",
               {Block::kGlobalRot, Block::kTranslation, Block::kScale, Block::kBodyPose, Block::kShape},
               StageData::kBody,
               400,
               1e-6});
  s.push_back({"joint",
               {Block::kGlobalRot, Block::kTranslation, Block::kScale, Block::kBodyPose, Block::kShape,
                Block::kWristPose, Block::kHandPose},
               StageData::kAll,
               400,
               1e-6});
  s.push_back({"wrists_final", {Block::kWristPose}, StageData::kHand, 200, 1e-6});
  s.push_back({"hands_final", {Block::kHandPose}, StageData::kHand, 200, 1e-6});
  return s;
}

StageSpec camera_stage() {
  return {"cameras",
          {Block::kCameras, Block::kGlobalRot, Block::kTranslation, Block::kScale, Block::kBodyPose, Block::kShape},
          StageData::kBody,
          -1};
}

void validate_fit_config(const FitConfig& c) {
  if (!(c.rel_decrease > 0.0)) throw ValidationError("fit rel_decrease must be > 0");
  if (!(c.step_length > 0.0)) throw ValidationError("fit step_length must be > 0");
  if (c.max_iterations < 1) throw ValidationError("fit max_iterations must be >= 1");
  if (c.memory < 1) throw ValidationError("fit memory must be >= 1");
  if (c.loss.huber_scale < 0.0 || c.loss.pose_prior < 0.0) throw ValidationError("loss scales must be >= 0");
  if (!(c.loss.hinge_eps > 0.0) || !(c.loss.hinge_kappa > 0.0)) throw ValidationError("hinge parameters must be > 0");
  if (c.stages.empty() && !c.optimize_cameras) throw ValidationError("fit has no stages");
  for (const StageSpec& s : c.stages) {
    if (s.blocks.empty()) throw ValidationError("stage '" + s.name + "' optimises nothing");
    if (s.max_iterations == 0 || s.max_iterations < -1)
      throw ValidationError("stage '" + s.name + "' max_iterations must be >= 1 or -1");
  }
}

ParamPacker::ParamPacker(const BodyModel& model, std::vector<Block> blocks, int num_rigs)
    : model_(&model), blocks_(std::move(blocks)), num_rigs_(num_rigs) {
  const int wl = model.pose_slot(model.wrist_joints[0]);
  const int wr = model.pose_slot(model.wrist_joints[1]);
  for (int s = 0; s < static_cast<int>(model.pose_joints.size()); ++s) {
    if (s == wl || s == wr) wrist_slots_.push_back(s);
    else body_slots_.push_back(s);
  }
  PoseParams p = PoseParams::zeros(model);
  std::vector<CameraDelta> d(num_rigs_);
  visit(p, d, [&](auto&) { ++size_; });
}

template <typename P, typename D, typename F>
void ParamPacker::visit(P& p, D& d, F&& f) const {
  for (Block b : blocks_) {
    switch (b) {
      case Block::kGlobalRot:
        for (int k = 0; k < 3; ++k) f(p.global_rot[k]);
        break;
      case Block::kTranslation:
        for (int k = 0; k < 3; ++k) f(p.translation[k]);
        break;
      case Block::kScale:
        f(p.scale);
        break;
      case Block::kBodyPose:
        for (int s : body_slots_)
          for (int k = 0; k < 3; ++k) f(p.theta[3 * s + k]);
        break;
      case Block::kWristPose:
        for (int s : wrist_slots_)
          for (int k = 0; k < 3; ++k) f(p.theta[3 * s + k]);
        break;
      case Block::kShape:
        for (Eigen::Index i = 0; i < p.beta.size(); ++i) f(p.beta[i]);
        break;
      case Block::kHandPose:
        for (Eigen::Index i = 0; i < p.hand_left.size(); ++i) f(p.hand_left[i]);
        for (Eigen::Index i = 0; i < p.hand_right.size(); ++i) f(p.hand_right[i]);
        break;
      case Block::kCameras:
        if (static_cast<int>(d.size()) != num_rigs_) throw Error("camera delta count differs from rig count");
        for (int r = 1; r < num_rigs_; ++r) {
          for (int k = 0; k < 3; ++k) f(d[r].omega[k]);
          for (int k = 0; k < 3; ++k) f(d[r].t[k]);
        }
        break;
    }
  }
}

Eigen::VectorXd ParamPacker::pack(const PoseParams& params, std::span<const CameraDelta> deltas) const {
  Eigen::VectorXd x(size_);
  int i = 0;
  visit(params, deltas, [&](const double& v) { x[i++] = v; });
  return x;
}

void ParamPacker::unpack(const Eigen::VectorXd& x, PoseParams& params, std::vector<CameraDelta>& deltas) const {
  if (x.size() != size_) throw Error("parameter vector has the wrong length");
  int i = 0;
  visit(params, deltas, [&](double& v) { v = x[i++]; });
}

Eigen::VectorXd ParamPacker::pack_gradient(const LossResult& loss) const {
  Eigen::VectorXd g(size_);
  int i = 0;
  std::vector<CameraDelta> cams = loss.camera_grad;
  if (cams.empty()) cams.resize(num_rigs_);
  visit(loss.grad, cams, [&](const double& v) { g[i++] = v; });
  return g;
}

Vec3 triangulate_rays(std::span<const Camera> cams, std::span<const Vec2> pixels) {
  if (cams.empty() || cams.size() != pixels.size()) throw Error("triangulation needs one pixel per camera");
  std::vector<Vec3> origins, dirs;
  for (size_t i = 0; i < cams.size(); ++i) {
    const Camera& c = cams[i];
    const Vec3 ray_cam((pixels[i].x() - c.cx) / c.fx, (pixels[i].y() - c.cy) / c.fy, 1.0);
    origins.push_back(c.center());
    dirs.push_back((c.R.transpose() * ray_cam).normalized());
  }
  if (cams.size() == 1) return origins[0] + dirs[0] * origins[0].norm();
  Mat3 A = Mat3::Zero();
  Vec3 b = Vec3::Zero();
  for (size_t i = 0; i < origins.size(); ++i) {
    const Mat3 P = Mat3::Identity() - dirs[i] * dirs[i].transpose();
    A += P;
    b += P * origins[i];
  }
  return A.ldlt().solve(b);
}

namespace {

int rig_count(std::span<const FitView> views) {
  int n = 0;
  for (const FitView& v : views) n = std::max(n, v.rig + 1);
  return n;
}

std::vector<Correspondence> select(std::span<const FitView> views, std::span<const Correspondence> corrs,
                                   const BodyModel& model, StageData data) {
  std::vector<Correspondence> out;
  for (const Correspondence& c : corrs) {
    const bool body_view = views[c.view].kind == ViewKind::kBody;
    const bool keep = data == StageData::kAll    ? true
                      : data == StageData::kBody ? body_view
                                                 : !body_view || model.parts[c.part].hand;
    if (keep) out.push_back(c);
  }
  return out;
}

std::vector<ViewResidual> view_residuals(const BodyModel& model, std::span<const FitView> views,
                                         std::span<const CameraDelta> deltas, std::span<const Correspondence> corrs,
                                         const PoseParams& params) {
  const std::vector<double> d = residuals(model, params, views, deltas, corrs);
  std::vector<ViewResidual> out(views.size());
  std::vector<std::vector<double>> per_view(views.size());
  for (size_t i = 0; i < corrs.size(); ++i) {
    if (!std::isfinite(d[i])) continue;
    ViewResidual& r = out[corrs[i].view];
    ++r.count;
    r.mean += d[i];
    r.weighted_sq += corrs[i].weight * d[i] * d[i];
    per_view[corrs[i].view].push_back(d[i]);
  }
  for (size_t v = 0; v < views.size(); ++v) {
    out[v].view = static_cast<int>(v);
    auto& vals = per_view[v];
    if (vals.empty()) continue;
    out[v].mean /= static_cast<double>(vals.size());
    std::nth_element(vals.begin(), vals.begin() + (vals.size() - 1) / 2, vals.end());
    out[v].median = vals[(vals.size() - 1) / 2];
  }
  return out;
}

// Per-parameter scale 1/sqrt(sum_i w_i |dp_i/dx_j|^2 / sum_i w_i), by central differences.
Eigen::VectorXd jacobi_scales(const BodyModel& model, const ParamPacker& packer, const PoseParams& params,
                              std::span<const FitView> views, std::span<const CameraDelta> deltas,
                              std::span<const Correspondence> data, bool cams) {
  const double h = 1e-5;
  const Eigen::VectorXd x0 = packer.pack(params, deltas);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(x0.size());
  double total_w = 0.0;
  for (const Correspondence& c : data) total_w += c.weight;
  if (!(total_w > 0.0)) return Eigen::VectorXd::Ones(x0.size());
  PoseParams p = params;
  std::vector<CameraDelta> d(deltas.begin(), deltas.end());
  auto project_at = [&](const Eigen::VectorXd& x) {
    packer.unpack(x, p, d);
    return project_correspondences(model, p, views, cams ? std::span<const CameraDelta>(d) : std::span<const CameraDelta>(),
                                   data);
  };
  for (Eigen::Index j = 0; j < x0.size(); ++j) {
    Eigen::VectorXd xp = x0, xm = x0;
    xp[j] += h;
    xm[j] -= h;
    const std::vector<Projection> a = project_at(xp), b = project_at(xm);
    for (size_t i = 0; i < data.size(); ++i)
      if (a[i].in_front && b[i].in_front) diag[j] += data[i].weight * (a[i].pixel - b[i].pixel).squaredNorm();
    diag[j] /= 4.0 * h * h * total_w;
  }
  const double floor = std::max(diag.maxCoeff() * 1e-8, 1e-12);
  Eigen::VectorXd s(x0.size());
  for (Eigen::Index j = 0; j < x0.size(); ++j) s[j] = 1.0 / std::sqrt(std::max(diag[j], floor));
  return s;
}

FitReport run_stages(const BodyModel& model, std::span<const FitView> views, std::span<const Correspondence> corrs,
                     const PoseParams& init, const FitConfig& config, const std::vector<StageSpec>& stages) {
  validate_fit_config(config);
  check_params(model, init);
  if (corrs.empty()) throw ValidationError("fit needs at least one correspondence");
  for (const Correspondence& c : corrs)
    if (c.view < 0 || c.view >= static_cast<int>(views.size())) throw ValidationError("correspondence view out of range");
  const auto t0 = std::chrono::steady_clock::now();
  const int rigs = rig_count(views);

  FitReport report;
  report.params = init;
  std::vector<CameraDelta> deltas(rigs);
  bool any_camera_stage = false;

  int body_views = 0;
  for (const FitView& v : views) body_views += v.kind == ViewKind::kBody;
  if (body_views < 2) report.warnings.push_back("fewer than two body views: depth is ambiguous");

  for (const StageSpec& stage : stages) {
    const bool cams = std::find(stage.blocks.begin(), stage.blocks.end(), Block::kCameras) != stage.blocks.end();
    if (cams && rigs < 2) throw ValidationError("camera refinement needs at least two cameras");
    any_camera_stage = any_camera_stage || cams;
    StageReport sr;
    sr.name = stage.name;
    const std::vector<Correspondence> data = select(views, corrs, model, stage.data);
    sr.correspondences = static_cast<int>(data.size());
    if (data.empty()) {
      sr.stop_reason = "no_data";
      report.stages.push_back(std::move(sr));
      continue;
    }
    const ParamPacker packer(model, stage.blocks, rigs);
    PoseParams work = report.params;
    std::vector<CameraDelta> work_deltas = deltas;
    int first_bad = -1;
    const Eigen::VectorXd scale =
        config.precondition ? jacobi_scales(model, packer, report.params, views, deltas, data, cams)
                            : Eigen::VectorXd::Ones(packer.size());
    const Objective objective = [&](const Eigen::VectorXd& z, Eigen::VectorXd* grad) {
      packer.unpack(z.cwiseProduct(scale), work, work_deltas);
      if (!work.all_finite()) return std::numeric_limits<double>::quiet_NaN();
      const std::span<const CameraDelta> d = cams ? std::span<const CameraDelta>(work_deltas) : std::span<const CameraDelta>();
      const LossResult lr = reprojection_loss(model, work, views, d, data, config.loss, grad != nullptr);
      if (lr.first_bad >= 0 && first_bad < 0) first_bad = lr.first_bad;
      if (grad) *grad = packer.pack_gradient(lr).cwiseProduct(scale);
      return lr.value;
    };
    LbfgsOptions lo;
    lo.memory = config.memory;
    lo.max_iterations = stage.max_iterations > 0 ? stage.max_iterations
                        : cams                   ? config.camera_stage_iterations
                                                 : config.max_iterations;
    lo.rel_decrease = stage.rel_decrease > 0.0 ? stage.rel_decrease : config.rel_decrease;
    lo.initial_step = config.step_length;
    const LbfgsResult res = minimize_lbfgs(objective, packer.pack(report.params, deltas).cwiseQuotient(scale), lo);
    sr.trajectory = res.trajectory;
    sr.iterations = res.iterations;
    sr.evaluations = res.evaluations;
    sr.stop_reason = to_string(res.reason);
    packer.unpack(res.x.cwiseProduct(scale), report.params, deltas);
    report.final_loss = res.value;
    report.stages.push_back(std::move(sr));
    if (res.reason == StopReason::kDiverged) {
      report.aborted = true;
      std::string msg = "stage '" + stage.name + "' produced a non-finite loss";
      if (first_bad >= 0) msg += " (correspondence " + std::to_string(first_bad) + ")";
      report.warnings.push_back(msg);
      break;
    }
  }
  if (any_camera_stage) report.camera_deltas = deltas;
  const std::span<const CameraDelta> d = any_camera_stage ? std::span<const CameraDelta>(deltas) : std::span<const CameraDelta>();
  if (report.params.all_finite()) report.residuals = view_residuals(model, views, d, corrs, report.params);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace

FitReport fit(const BodyModel& model, std::span<const FitView> views, std::span<const Correspondence> corrs,
              const PoseParams& init, const FitConfig& config) {
  std::vector<StageSpec> stages = config.stages;
  if (config.optimize_cameras) stages.push_back(camera_stage());
  return run_stages(model, views, corrs, init, config, stages);
}

FitReport refine_cameras(const BodyModel& model, std::span<const FitView> views, std::span<const Correspondence> corrs,
                         const PoseParams& params, const FitConfig& config) {
  if (rig_count(views) < 2) throw ValidationError("camera refinement needs at least two cameras");
  return run_stages(model, views, corrs, params, config, {camera_stage()});
}

}  // namespace proxyfit
