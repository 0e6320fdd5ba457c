#include "proxyfit/metrics.hpp"

#include <algorithm>

#include <Eigen/Dense>

#include "proxyfit/error.hpp"

namespace proxyfit {

Points3 Similarity::apply(const Points3& pts) const {
  Points3 out = (s * (pts * R.transpose())).eval();
  out.rowwise() += t.transpose();
  return out;
}

Similarity procrustes_align(const Points3& X, const Points3& Y) {
  if (X.rows() != Y.rows()) throw ValidationError("procrustes: point counts differ");
  if (X.rows() < 3) throw ValidationError("procrustes: need at least 3 points");
  const double n = static_cast<double>(X.rows());
  const Vec3 mx = X.colwise().mean().transpose();
  const Vec3 my = Y.colwise().mean().transpose();
  const Points3 Xc = X.rowwise() - mx.transpose();
  const Points3 Yc = Y.rowwise() - my.transpose();

  Eigen::JacobiSVD<Eigen::MatrixXd> shape(Xc);
  const Eigen::VectorXd sv = shape.singularValues();
  if (!(sv[0] > 0.0) || sv[1] <= 1e-10 * sv[0]) throw ValidationError("procrustes: degenerate (collinear) configuration");

  const Mat3 cov = Yc.transpose() * Xc / n;
  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec3 d(1.0, 1.0, 1.0);
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) d[2] = -1.0;
  Similarity T;
  T.R = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();
  const double var_x = Xc.squaredNorm() / n;
  T.s = svd.singularValues().dot(d) / var_x;
  T.t = my - T.s * T.R * mx;
  return T;
}

double alignment_residual(const Similarity& T, const Points3& X, const Points3& Y) {
  return (T.apply(X) - Y).rowwise().squaredNorm().mean();
}

MetricSubset hand_subset(const BodyModel& model) {
  MetricSubset out;
  for (HandSide side : {HandSide::kLeft, HandSide::kRight}) {
    const auto joints = model.hand_joints(side);
    out.joints.insert(out.joints.end(), joints.begin(), joints.end());
  }
  std::sort(out.joints.begin(), out.joints.end());
  std::vector<char> hand_vertex(model.num_vertices(), 0);
  for (int f = 0; f < model.num_faces(); ++f)
    if (model.parts[model.face_part[f]].hand)
      for (int v : model.faces[f]) hand_vertex[v] = 1;
  for (int v = 0; v < model.num_vertices(); ++v)
    if (hand_vertex[v]) out.vertices.push_back(v);
  return out;
}

namespace {

Points3 rows(const Points3& p, const std::vector<int>& idx) {
  Points3 out(static_cast<Eigen::Index>(idx.size()), 3);
  for (size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = p.row(idx[i]);
  return out;
}

double mean_distance(const Points3& a, const Points3& b) {
  if (a.rows() == 0) return 0.0;
  return (a - b).rowwise().norm().mean();
}

}  // namespace

MetricReport joint_and_vertex_errors(const PosedMesh& pred, const PosedMesh& gt, const std::optional<MetricSubset>& subset) {
  if (pred.joints.rows() != gt.joints.rows() || pred.vertices.rows() != gt.vertices.rows() || gt.joints.rows() == 0)
    throw ValidationError("metrics: prediction and ground truth have different topology");
  Points3 pj = pred.joints, gj = gt.joints, pv = pred.vertices, gv = gt.vertices;
  const Vec3 shift = (gt.joints.row(0) - pred.joints.row(0)).transpose();
  Points3 pj_root = pj.rowwise() + shift.transpose();
  Points3 pv_root = pv.rowwise() + shift.transpose();
  if (subset) {
    pj = rows(pj, subset->joints);
    gj = rows(gj, subset->joints);
    pj_root = rows(pj_root, subset->joints);
    pv = rows(pv, subset->vertices);
    gv = rows(gv, subset->vertices);
    pv_root = rows(pv_root, subset->vertices);
  }
  MetricReport r;
  r.mpjpe = mean_distance(pj_root, gj);
  r.mpvpe = mean_distance(pv_root, gv);
  const Similarity T = procrustes_align(pj, gj);
  r.pa_mpjpe = mean_distance(T.apply(pj), gj);
  r.pa_mpvpe = mean_distance(T.apply(pv), gv);
  return r;
}

}  // namespace proxyfit
