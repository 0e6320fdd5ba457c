#include <cmath>

#include <gtest/gtest.h>

#include "fit_fixtures.hpp"
#include "oracles.hpp"
#include "proxyfit/error.hpp"
#include "proxyfit/fitter.hpp"

using namespace proxyfit;

namespace {

double param_drift(const PoseParams& a, const PoseParams& b) {
  double d = 0.0;
  d = std::max(d, (a.beta - b.beta).cwiseAbs().maxCoeff());
  d = std::max(d, (a.theta - b.theta).cwiseAbs().maxCoeff());
  d = std::max(d, (a.hand_left - b.hand_left).cwiseAbs().maxCoeff());
  d = std::max(d, (a.hand_right - b.hand_right).cwiseAbs().maxCoeff());
  d = std::max(d, (a.global_rot - b.global_rot).cwiseAbs().maxCoeff());
  d = std::max(d, (a.translation - b.translation).cwiseAbs().maxCoeff());
  return std::max(d, std::abs(a.scale - b.scale));
}

const fixture::Problem& problem() {
  static const fixture::Problem p = fixture::clean_problem(11, 4);
  return p;
}

}  // namespace

TEST(Fitter, GroundTruthIsAFixedPoint) {
  // Pixels moved onto the exact projection of each ground-truth surface point.
  fixture::Problem p = problem();
  const PosedMesh& mesh = p.scene.gt_mesh;
  for (Correspondence& c : p.corrs) {
    Vec3 X = Vec3::Zero();
    for (int k = 0; k < 3; ++k) X += c.bary[k] * mesh.vertices.row(p.scene.model.faces[c.face][k]).transpose();
    c.pixel = project(p.inputs.views[c.view].camera, X).pixel;
  }
  const FitReport r = fit(p.scene.model, p.inputs.views, p.corrs, p.scene.gt_params);
  ASSERT_FALSE(r.aborted);
  ASSERT_EQ(r.stages.size(), default_stages().size());
  for (const StageReport& s : r.stages) EXPECT_LE(s.iterations, 2) << s.name << " " << s.stop_reason;
  EXPECT_LE(param_drift(r.params, p.scene.gt_params), 1e-4);
}

TEST(Fitter, RenderedGroundTruthStopsQuickly) {
  const fixture::Problem& p = problem();
  const FitReport r = fit(p.scene.model, p.inputs.views, p.corrs, p.scene.gt_params);
  ASSERT_FALSE(r.aborted);
  for (const StageReport& s : r.stages) {
    EXPECT_LE(s.iterations, 2) << s.name << " " << s.stop_reason;
    for (size_t i = 1; i < s.trajectory.size(); ++i) EXPECT_LE(s.trajectory[i], s.trajectory[i - 1]) << s.name;
  }
  // Quantised pixels move the optimum slightly off the ground truth.
  EXPECT_LE(param_drift(r.params, p.scene.gt_params), 5e-3);
}

TEST(Fitter, RecoversFromPerturbedInit) {
  const fixture::Problem& p = problem();
  PoseParams init = p.scene.gt_params;
  init.translation += Vec3(0.3, 0.0, 0.0);
  init.global_rot += Vec3(0.0, 0.2, 0.0);
  FitConfig cfg;
  cfg.stages = extended_stages();
  const FitReport r = fit(p.scene.model, p.inputs.views, p.corrs, init, cfg);
  ASSERT_FALSE(r.aborted);
  const MetricReport m = joint_and_vertex_errors(forward(p.scene.model, r.params), p.scene.gt_mesh);
  EXPECT_LE(m.pa_mpjpe, 2e-3);
  EXPECT_LT(r.final_loss, r.stages.front().trajectory.front());
}

TEST(Fitter, CameraRefinementKeepsRigZeroAndGroundTruth) {
  const fixture::Problem& p = problem();
  const FitReport r = refine_cameras(p.scene.model, p.inputs.views, p.corrs, p.scene.gt_params);
  ASSERT_FALSE(r.aborted);
  ASSERT_EQ(r.camera_deltas.size(), p.inputs.body_views.size());
  EXPECT_EQ(r.camera_deltas[0].omega, Vec3::Zero());
  EXPECT_EQ(r.camera_deltas[0].t, Vec3::Zero());
  for (const FitView& v : p.inputs.views) {
    if (v.rig != 0) continue;
    const Camera out = apply_delta(v.camera, r.camera_deltas[0]);
    EXPECT_TRUE(out == v.camera);
  }
  for (size_t k = 1; k < r.camera_deltas.size(); ++k) {
    EXPECT_LE(r.camera_deltas[k].omega.cwiseAbs().maxCoeff(), 1e-4);
    EXPECT_LE(r.camera_deltas[k].t.cwiseAbs().maxCoeff(), 1e-4);
  }
}

TEST(Fitter, SingleViewRefinementIsRejected) {
  const fixture::Problem p = fixture::clean_problem(12, 1, false);
  EXPECT_THROW(refine_cameras(p.scene.model, p.inputs.views, p.corrs, p.scene.gt_params), ValidationError);
}

TEST(Fitter, SingleViewWarnsAboutDepth) {
  const fixture::Problem p = fixture::clean_problem(12, 1, false);
  FitConfig cfg;
  cfg.stages = {default_stages()[0]};
  const FitReport r = fit(p.scene.model, p.inputs.views, p.corrs, p.scene.gt_params, cfg);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings[0].find("depth"), std::string::npos);
}

TEST(Fitter, EmptyStageIsSkipped) {
  const fixture::Problem& p = problem();
  std::vector<Correspondence> body_only;
  for (const Correspondence& c : p.corrs)
    if (p.inputs.views[c.view].kind == ViewKind::kBody && !p.scene.model.parts[c.part].hand) body_only.push_back(c);
  FitConfig cfg;
  cfg.stages = {default_stages().back()};
  const FitReport r = fit(p.scene.model, p.inputs.views, body_only, p.scene.gt_params, cfg);
  ASSERT_EQ(r.stages.size(), 1u);
  EXPECT_EQ(r.stages[0].correspondences, 0);
  EXPECT_EQ(r.stages[0].iterations, 0);
  EXPECT_EQ(r.params.hand_left, p.scene.gt_params.hand_left);
}

TEST(Fitter, ConfigValidation) {
  FitConfig cfg;
  EXPECT_NO_THROW(validate_fit_config(cfg));
  cfg.stages.clear();
  EXPECT_THROW(validate_fit_config(cfg), ValidationError);
  cfg = {};
  cfg.max_iterations = 0;
  EXPECT_THROW(validate_fit_config(cfg), ValidationError);
  cfg = {};
  cfg.stages[0].blocks.clear();
  EXPECT_THROW(validate_fit_config(cfg), ValidationError);
}

TEST(Fitter, PackerRoundTrip) {
  const BodyModel& m = fixture::model();
  const ParamPacker packer(m, {Block::kBodyPose, Block::kHandPose, Block::kScale, Block::kCameras}, 3);
  PoseParams p = fixture::pose(3);
  p.scale = 1.3;
  std::vector<CameraDelta> d(3);
  d[1].omega = Vec3(0.1, 0.2, 0.3);
  d[2].t = Vec3(-1, 0, 1);
  const Eigen::VectorXd x = packer.pack(p, d);
  EXPECT_EQ(x.size(), packer.size());
  PoseParams q = PoseParams::zeros(m);
  std::vector<CameraDelta> e(3);
  packer.unpack(x, q, e);
  EXPECT_EQ(packer.pack(q, e), x);
  EXPECT_EQ(q.scale, 1.3);
  EXPECT_EQ(e[1].omega, d[1].omega);
  // Rig 0 stays frozen and is not part of the vector.
  EXPECT_EQ(e[0].omega, Vec3::Zero());
}

TEST(Fitter, TriangulateRays) {
  std::vector<Camera> cams(2);
  cams[0].fx = cams[0].fy = cams[1].fx = cams[1].fy = 100;
  cams[0].t = Vec3(0, 0, 5);
  cams[1].R = oracle::axis_angle(Vec3(0, M_PI / 2, 0));
  cams[1].t = Vec3(0, 0, 5);
  const Vec3 X(0.3, -0.2, 0.1);
  const std::vector<Vec2> px{project(cams[0], X).pixel, project(cams[1], X).pixel};
  EXPECT_LT((triangulate_rays(cams, px) - X).norm(), 1e-9);
}
