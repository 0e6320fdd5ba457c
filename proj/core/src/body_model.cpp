#include "proxyfit/body_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "proxyfit/error.hpp"

namespace proxyfit {

HandSide parse_hand_side(std::string_view name) {
  if (name == "left" || name == "l") return HandSide::kLeft;
  if (name == "right" || name == "r") return HandSide::kRight;
  throw Error("unknown hand side '" + std::string(name) + "'");
}

std::string_view to_string(Side side) {
  switch (side) {
    case Side::kLeft: return "left";
    case Side::kRight: return "right";
    case Side::kCenter: break;
  }
  return "center";
}

Side parse_side(std::string_view name) {
  if (name == "left") return Side::kLeft;
  if (name == "right") return Side::kRight;
  if (name == "center") return Side::kCenter;
  throw ParseError("unknown side '" + std::string(name) + "'");
}

int BodyModel::find_part(std::string_view name) const {
  for (int i = 0; i < num_parts(); ++i)
    if (parts[i].name == name) return i;
  return -1;
}

int BodyModel::find_joint(std::string_view name) const {
  for (int i = 0; i < num_joints(); ++i)
    if (joint_names[i] == name) return i;
  return -1;
}

int BodyModel::pose_slot(int joint) const {
  const auto it = std::find(pose_joints.begin(), pose_joints.end(), joint);
  return it == pose_joints.end() ? -1 : static_cast<int>(it - pose_joints.begin());
}

std::vector<int> BodyModel::hand_parts(HandSide side) const {
  const Side want = side == HandSide::kLeft ? Side::kLeft : Side::kRight;
  std::vector<int> out;
  for (int i = 0; i < num_parts(); ++i)
    if (parts[i].hand && parts[i].side == want) out.push_back(i);
  return out;
}

std::vector<int> BodyModel::hand_joints(HandSide side) const {
  const int s = static_cast<int>(side);
  std::vector<int> out{wrist_joints[s]};
  out.insert(out.end(), hand_pca[s].joints.begin(), hand_pca[s].joints.end());
  return out;
}

bool BodyModel::operator==(const BodyModel& o) const {
  auto same_pca = [](const HandPca& a, const HandPca& b) {
    return a.joints == b.joints && a.mean.size() == b.mean.size() && a.mean == b.mean &&
           a.components.rows() == b.components.rows() && a.components.cols() == b.components.cols() &&
           a.components == b.components;
  };
  auto same_uvs = [](const std::vector<std::array<Vec2, 3>>& a, const std::vector<std::array<Vec2, 3>>& b) {
    if (a.size() != b.size()) return false;
    for (size_t f = 0; f < a.size(); ++f)
      for (int c = 0; c < 3; ++c)
        if (a[f][c] != b[f][c]) return false;
    return true;
  };
  return template_vertices.rows() == o.template_vertices.rows() && template_vertices == o.template_vertices &&
         faces == o.faces && same_uvs(corner_uvs, o.corner_uvs) && face_part == o.face_part && parts == o.parts &&
         joint_names == o.joint_names && parents == o.parents && joint_regressor == o.joint_regressor &&
         skinning == o.skinning && shape_basis.rows() == o.shape_basis.rows() &&
         shape_basis.cols() == o.shape_basis.cols() && shape_basis == o.shape_basis && pose_joints == o.pose_joints &&
         wrist_joints == o.wrist_joints && same_pca(hand_pca[0], o.hand_pca[0]) && same_pca(hand_pca[1], o.hand_pca[1]);
}

PoseParams PoseParams::zeros(const BodyModel& model) {
  PoseParams p;
  p.beta = Eigen::VectorXd::Zero(model.num_shape());
  p.theta = Eigen::VectorXd::Zero(3 * static_cast<int>(model.pose_joints.size()));
  p.hand_left = Eigen::VectorXd::Zero(model.num_hand_components());
  p.hand_right = Eigen::VectorXd::Zero(model.num_hand_components());
  return p;
}

bool PoseParams::all_finite() const {
  return beta.allFinite() && theta.allFinite() && hand_left.allFinite() && hand_right.allFinite() &&
         global_rot.allFinite() && translation.allFinite() && std::isfinite(scale);
}

void check_params(const BodyModel& model, const PoseParams& params) {
  auto mismatch = [](const char* what, Eigen::Index got, Eigen::Index want) {
    std::ostringstream os;
    os << "parameter dimension mismatch: " << what << " has " << got << ", model expects " << want;
    throw Error(os.str());
  };
  if (params.beta.size() != model.num_shape()) mismatch("beta", params.beta.size(), model.num_shape());
  const Eigen::Index theta_dim = 3 * static_cast<Eigen::Index>(model.pose_joints.size());
  if (params.theta.size() != theta_dim) mismatch("theta", params.theta.size(), theta_dim);
  if (params.hand_left.size() != model.num_hand_components())
    mismatch("hand_left", params.hand_left.size(), model.num_hand_components());
  if (params.hand_right.size() != model.num_hand_components())
    mismatch("hand_right", params.hand_right.size(), model.num_hand_components());
  if (!params.all_finite()) throw Error("non-finite pose parameter");
  if (!(params.scale > 0.0)) throw Error("scale must be positive");
}

Eigen::VectorXd expand_hand_pose(const BodyModel& model, const Eigen::VectorXd& coeffs, HandSide side) {
  const int s = static_cast<int>(side);
  if (s < 0 || s > 1) throw Error("unknown hand side");
  const HandPca& pca = model.hand_pca[s];
  if (coeffs.size() > pca.num_components()) throw Error("too many hand PCA coefficients");
  Eigen::VectorXd out = pca.mean;
  if (coeffs.size() > 0) out.noalias() += pca.components.leftCols(coeffs.size()) * coeffs;
  return out;
}

Points3 regress_joints(const BodyModel& model, const Points3& vertices) {
  Points3 joints = Points3::Zero(model.num_joints(), 3);
  for (int j = 0; j < model.num_joints(); ++j)
    for (const Influence& inf : model.joint_regressor[j]) joints.row(j) += inf.weight * vertices.row(inf.index);
  return joints;
}

SkinningState forward_state(const BodyModel& model, const PoseParams& params) {
  check_params(model, params);
  const int V = model.num_vertices();
  const int J = model.num_joints();

  SkinningState st;
  st.shaped = model.template_vertices;
  if (model.num_shape() > 0) {
    const Eigen::VectorXd disp = model.shape_basis * params.beta;
    for (int i = 0; i < V; ++i) st.shaped.row(i) += disp.segment<3>(3 * i).transpose();
  }
  st.rest_joints = regress_joints(model, st.shaped);

  st.local_rot.assign(J, Mat3::Identity());
  st.local_jac.assign(J, {Mat3::Zero(), Mat3::Zero(), Mat3::Zero()});
  for (size_t slot = 0; slot < model.pose_joints.size(); ++slot) {
    const int j = model.pose_joints[slot];
    const Vec3 r = params.theta.segment<3>(3 * static_cast<Eigen::Index>(slot));
    st.local_rot[j] = rodrigues(r);
    st.local_jac[j] = rodrigues_jacobian(r);
  }
  for (int s = 0; s < 2; ++s) {
    const HandSide side = static_cast<HandSide>(s);
    const Eigen::VectorXd fingers = expand_hand_pose(model, params.hand(side), side);
    const auto& joints = model.hand_pca[s].joints;
    for (size_t k = 0; k < joints.size(); ++k) {
      const Vec3 r = fingers.segment<3>(3 * static_cast<Eigen::Index>(k));
      st.local_rot[joints[k]] = rodrigues(r);
      st.local_jac[joints[k]] = rodrigues_jacobian(r);
    }
  }

  st.chain_rot.resize(J);
  st.chain_trans.resize(J);
  for (int j = 0; j < J; ++j) {
    const int p = model.parents[j];
    const Vec3 rest = st.rest_joints.row(j).transpose();
    if (p < 0) {
      st.chain_rot[j] = st.local_rot[j];
      st.chain_trans[j] = rest;
    } else {
      const Vec3 offset = rest - st.rest_joints.row(p).transpose();
      st.chain_rot[j] = st.chain_rot[p] * st.local_rot[j];
      st.chain_trans[j] = st.chain_rot[p] * offset + st.chain_trans[p];
    }
  }

  st.skinned.resize(V, 3);
  for (int i = 0; i < V; ++i) {
    Vec3 acc = Vec3::Zero();
    const Vec3 x = st.shaped.row(i).transpose();
    for (const Influence& inf : model.skinning[i]) {
      const int j = inf.index;
      acc += inf.weight * (st.chain_rot[j] * (x - st.rest_joints.row(j).transpose()) + st.chain_trans[j]);
    }
    st.skinned.row(i) = acc.transpose();
  }

  st.root_rot = rodrigues(params.global_rot);
  st.root_jac = rodrigues_jacobian(params.global_rot);
  const double s = params.scale;
  const Eigen::RowVector3d T = params.translation.transpose();
  st.mesh.vertices = (s * (st.skinned * st.root_rot.transpose())).rowwise() + T;
  st.mesh.joints.resize(J, 3);
  for (int j = 0; j < J; ++j)
    st.mesh.joints.row(j) = (s * (st.root_rot * st.chain_trans[j])).transpose() + T;
  return st;
}

PosedMesh forward(const BodyModel& model, const PoseParams& params) {
  return std::move(forward_state(model, params).mesh);
}

PoseParams backward(const BodyModel& model, const PoseParams& params, const SkinningState& st,
                    const Points3& grad_vertices) {
  const int V = model.num_vertices();
  const int J = model.num_joints();
  const double s = params.scale;
  PoseParams g = PoseParams::zeros(model);
  g.scale = 0.0;

  // Global similarity.
  Mat3 g_root = Mat3::Zero();
  Points3 g_skin(V, 3);
  Vec3 g_T = Vec3::Zero();
  double g_s = 0.0;
  const Mat3 Rt = st.root_rot.transpose();
  for (int i = 0; i < V; ++i) {
    const Vec3 gv = grad_vertices.row(i).transpose();
    if (gv.isZero(0.0)) {
      g_skin.row(i).setZero();
      continue;
    }
    const Vec3 skinned = st.skinned.row(i).transpose();
    g_T += gv;
    g_s += gv.dot(st.root_rot * skinned);
    g_root += s * gv * skinned.transpose();
    g_skin.row(i) = (s * (Rt * gv)).transpose();
  }
  g.translation = g_T;
  g.scale = g_s;
  for (int k = 0; k < 3; ++k) g.global_rot[k] = frobenius_dot(g_root, st.root_jac[k]);

  // Linear blend skinning.
  std::vector<Mat3> g_chain_rot(J, Mat3::Zero());
  std::vector<Vec3> g_chain_trans(J, Vec3::Zero());
  Points3 g_joints = Points3::Zero(J, 3);
  Points3 g_shaped = Points3::Zero(V, 3);
  for (int i = 0; i < V; ++i) {
    const Vec3 gv = g_skin.row(i).transpose();
    if (gv.isZero(0.0)) continue;
    const Vec3 x = st.shaped.row(i).transpose();
    Vec3 gx = Vec3::Zero();
    for (const Influence& inf : model.skinning[i]) {
      const int j = inf.index;
      const Vec3 wg = inf.weight * gv;
      const Vec3 local = x - st.rest_joints.row(j).transpose();
      g_chain_rot[j] += wg * local.transpose();
      g_chain_trans[j] += wg;
      const Vec3 back = st.chain_rot[j].transpose() * wg;
      gx += back;
      g_joints.row(j) -= back.transpose();
    }
    g_shaped.row(i) += gx.transpose();
  }

  // Kinematic chain, leaves first.
  std::vector<Mat3> g_local(J, Mat3::Zero());
  for (int j = J - 1; j >= 0; --j) {
    const int p = model.parents[j];
    if (p < 0) {
      g_joints.row(j) += g_chain_trans[j].transpose();
      continue;
    }
    const Vec3 offset = (st.rest_joints.row(j) - st.rest_joints.row(p)).transpose();
    g_chain_rot[p] += g_chain_rot[j] * st.local_rot[j].transpose() + g_chain_trans[j] * offset.transpose();
    g_local[j] = st.chain_rot[p].transpose() * g_chain_rot[j];
    g_chain_trans[p] += g_chain_trans[j];
    const Vec3 g_offset = st.chain_rot[p].transpose() * g_chain_trans[j];
    g_joints.row(j) += g_offset.transpose();
    g_joints.row(p) -= g_offset.transpose();
  }

  for (size_t slot = 0; slot < model.pose_joints.size(); ++slot) {
    const int j = model.pose_joints[slot];
    for (int k = 0; k < 3; ++k) g.theta[3 * static_cast<Eigen::Index>(slot) + k] = frobenius_dot(g_local[j], st.local_jac[j][k]);
  }
  for (int s_idx = 0; s_idx < 2; ++s_idx) {
    const HandPca& pca = model.hand_pca[s_idx];
    if (pca.num_components() == 0) continue;
    Eigen::VectorXd g_fingers(3 * static_cast<Eigen::Index>(pca.joints.size()));
    for (size_t k = 0; k < pca.joints.size(); ++k) {
      const int j = pca.joints[k];
      for (int a = 0; a < 3; ++a) g_fingers[3 * static_cast<Eigen::Index>(k) + a] = frobenius_dot(g_local[j], st.local_jac[j][a]);
    }
    g.hand(static_cast<HandSide>(s_idx)) = pca.components.transpose() * g_fingers;
  }

  // Joint regressor and shape basis.
  for (int j = 0; j < J; ++j) {
    const Eigen::RowVector3d gj = g_joints.row(j);
    if (gj.isZero(0.0)) continue;
    for (const Influence& inf : model.joint_regressor[j]) g_shaped.row(inf.index) += inf.weight * gj;
  }
  if (model.num_shape() > 0) {
    const Eigen::Map<const Eigen::VectorXd> flat(g_shaped.data(), 3 * static_cast<Eigen::Index>(V));
    g.beta = model.shape_basis.transpose() * flat;
  }
  return g;
}

bool uv_triangles_overlap(const std::array<Vec2, 3>& a, const std::array<Vec2, 3>& b, double eps) {
  // Separating axis test over the six edge normals. Projections that only
  // touch (overlap <= eps) count as separated.
  auto separated_along = [&](const Vec2& axis) {
    double amin = std::numeric_limits<double>::infinity(), amax = -amin;
    double bmin = amin, bmax = -amin;
    for (int i = 0; i < 3; ++i) {
      const double pa = axis.dot(a[i]);
      const double pb = axis.dot(b[i]);
      amin = std::min(amin, pa);
      amax = std::max(amax, pa);
      bmin = std::min(bmin, pb);
      bmax = std::max(bmax, pb);
    }
    return amax <= bmin + eps || bmax <= amin + eps;
  };
  for (const auto* tri : {&a, &b}) {
    for (int i = 0; i < 3; ++i) {
      const Vec2 e = (*tri)[(i + 1) % 3] - (*tri)[i];
      const double len = e.norm();
      if (len == 0.0) continue;
      const Vec2 n(-e.y() / len, e.x() / len);
      if (separated_along(n)) return false;
    }
  }
  return true;
}

std::optional<std::pair<int, int>> find_uv_overlap(const BodyModel& model, int part) {
  std::vector<int> faces;
  for (int f = 0; f < model.num_faces(); ++f)
    if (model.face_part[f] == part) faces.push_back(f);
  // Sort by min-u so the sweep can stop early.
  std::vector<std::pair<double, double>> span(faces.size());
  for (size_t k = 0; k < faces.size(); ++k) {
    const auto& uv = model.corner_uvs[faces[k]];
    span[k] = {std::min({uv[0].x(), uv[1].x(), uv[2].x()}), std::max({uv[0].x(), uv[1].x(), uv[2].x()})};
  }
  std::vector<size_t> order(faces.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return span[a].first < span[b].first; });
  for (size_t a = 0; a < order.size(); ++a) {
    for (size_t b = a + 1; b < order.size(); ++b) {
      if (span[order[b]].first >= span[order[a]].second) break;
      const int fa = faces[order[a]], fb = faces[order[b]];
      if (uv_triangles_overlap(model.corner_uvs[fa], model.corner_uvs[fb]))
        return std::make_pair(std::min(fa, fb), std::max(fa, fb));
    }
  }
  return std::nullopt;
}

void validate_model(const BodyModel& model) {
  const int V = model.num_vertices();
  const int F = model.num_faces();
  const int J = model.num_joints();
  const int P = model.num_parts();
  auto fail = [](const std::string& msg) { throw ValidationError("invalid body model: " + msg); };

  if (V == 0 || F == 0 || J == 0) fail("empty mesh or skeleton");
  if (!model.template_vertices.allFinite()) fail("non-finite template vertex");
  if (static_cast<int>(model.corner_uvs.size()) != F) fail("corner_uvs count differs from face count");
  if (static_cast<int>(model.face_part.size()) != F) fail("face_part count differs from face count");
  if (static_cast<int>(model.joint_names.size()) != J) fail("joint_names count differs from joint count");
  if (static_cast<int>(model.joint_regressor.size()) != J) fail("joint_regressor row count differs from joint count");
  if (static_cast<int>(model.skinning.size()) != V) fail("skinning row count differs from vertex count");
  if (model.shape_basis.rows() != 3 * static_cast<Eigen::Index>(V)) fail("shape_basis must have 3V rows");

  for (int f = 0; f < F; ++f) {
    for (int c = 0; c < 3; ++c) {
      const int v = model.faces[f][c];
      if (v < 0 || v >= V) fail("face " + std::to_string(f) + " references vertex out of range");
      const Vec2& uv = model.corner_uvs[f][c];
      if (!(uv.x() >= 0.0 && uv.x() <= 1.0 && uv.y() >= 0.0 && uv.y() <= 1.0))
        fail("face " + std::to_string(f) + " has uv outside [0,1]^2");
    }
    const int part = model.face_part[f];
    if (part < 0 || part >= P) fail("face " + std::to_string(f) + " has unknown part id " + std::to_string(part));
  }
  for (int p = 0; p < P; ++p) {
    const int m = model.parts[p].mirror;
    if (m >= P || (m >= 0 && model.parts[m].mirror != p)) fail("part '" + model.parts[p].name + "' has inconsistent mirror");
  }

  int roots = 0;
  for (int j = 0; j < J; ++j) {
    const int p = model.parents[j];
    if (p < 0) {
      ++roots;
      if (j != 0) fail("kinematic tree root must be joint 0");
    } else if (p >= j) {
      fail("kinematic tree is not topologically ordered at joint " + std::to_string(j) + " (cycle or forward reference)");
    }
  }
  if (roots != 1) fail("kinematic tree must have exactly one root, found " + std::to_string(roots));

  for (int i = 0; i < V; ++i) {
    double sum = 0.0;
    for (const Influence& inf : model.skinning[i]) {
      if (inf.index < 0 || inf.index >= J) fail("skinning weight of vertex " + std::to_string(i) + " references unknown joint");
      if (!(inf.weight >= 0.0)) fail("negative skinning weight at vertex " + std::to_string(i));
      sum += inf.weight;
    }
    if (std::abs(sum - 1.0) > 1e-6) fail("skinning weights of vertex " + std::to_string(i) + " do not sum to 1");
  }
  for (int j = 0; j < J; ++j)
    for (const Influence& inf : model.joint_regressor[j])
      if (inf.index < 0 || inf.index >= V) fail("joint regressor row " + std::to_string(j) + " references unknown vertex");

  std::vector<int> pose_seen(J, 0);
  for (int j : model.pose_joints) {
    if (j <= 0 || j >= J) fail("pose joint index out of range (the root is driven by global_rot)");
    if (pose_seen[j]++) fail("pose joint listed twice");
  }
  for (int s = 0; s < 2; ++s) {
    if (model.pose_slot(model.wrist_joints[s]) < 0) fail("wrist joint is not pose-driven");
    const HandPca& pca = model.hand_pca[s];
    const Eigen::Index dof = 3 * static_cast<Eigen::Index>(pca.joints.size());
    if (pca.mean.size() != dof || pca.components.rows() != dof) fail("hand PCA dimensions do not match its joints");
    if (pca.num_components() != model.hand_pca[0].num_components()) fail("left/right hand PCA sizes differ");
    for (int j : pca.joints) {
      if (j <= 0 || j >= J) fail("hand PCA joint out of range");
      if (pose_seen[j]) fail("joint " + model.joint_names[j] + " is driven by both theta and hand PCA");
    }
  }

  for (int p = 0; p < P; ++p) {
    if (auto hit = find_uv_overlap(model, p)) {
      fail("uv triangles overlap in part '" + model.parts[p].name + "' (faces " + std::to_string(hit->first) + " and " +
           std::to_string(hit->second) + ")");
    }
  }
}

}  // namespace proxyfit
