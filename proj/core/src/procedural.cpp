#include "proxyfit/procedural.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include "proxyfit/error.hpp"

namespace proxyfit {

namespace {

struct TubeSpec {
  std::string joint;
  std::string parent;  // empty for the root
  Vec3 start;
  Vec3 end;
  double r0;
  double r1;
  std::string part;       // part name; split tubes use part + "_left"/"_right"
  bool split = false;     // halves of the circumference become separate parts
  int finger_band = -1;   // segment index inside a finger chart, -1 otherwise
  int finger_bands = 1;
  bool finger = false;
  std::string symmetry;   // joint class shared by mirrored joints (shape basis)
};

struct PartSpec {
  std::string name;
  Side side;
  bool hand;
  std::string region;
};

Vec3 mirror_x(const Vec3& p) { return Vec3(-p.x(), p.y(), p.z()); }

std::string side_prefix(Side s) { return s == Side::kLeft ? "left_" : "right_"; }

// Part table: 24 body parts followed by 12 hand parts.
std::vector<PartSpec> part_table() {
  std::vector<PartSpec> parts = {
      {"pelvis", Side::kCenter, false, "torso"},
      {"spine1_left", Side::kLeft, false, "torso"},
      {"spine1_right", Side::kRight, false, "torso"},
      {"spine2_left", Side::kLeft, false, "torso"},
      {"spine2_right", Side::kRight, false, "torso"},
      {"spine3_left", Side::kLeft, false, "torso"},
      {"spine3_right", Side::kRight, false, "torso"},
      {"neck", Side::kCenter, false, "head"},
      {"head", Side::kCenter, false, "head"},
      {"jaw", Side::kCenter, false, "head"},
  };
  for (Side s : {Side::kLeft, Side::kRight}) {
    const std::string p = side_prefix(s);
    for (const char* n : {"thigh", "calf", "foot", "toes"}) parts.push_back({p + n, s, false, p + "leg"});
  }
  for (Side s : {Side::kLeft, Side::kRight}) {
    const std::string p = side_prefix(s);
    for (const char* n : {"collar", "upper_arm", "forearm"}) parts.push_back({p + n, s, false, p + "arm"});
  }
  for (Side s : {Side::kLeft, Side::kRight}) {
    const std::string p = side_prefix(s);
    for (const char* n : {"palm", "thumb", "index", "middle", "ring", "pinky"}) parts.push_back({p + n, s, true, p + "hand"});
  }
  return parts;
}

const char* kFingers[5] = {"thumb", "index", "middle", "ring", "pinky"};

std::vector<TubeSpec> skeleton(int finger_segments) {
  std::vector<TubeSpec> t;
  t.push_back({"pelvis", "", {0, 0.90, 0}, {0, 1.05, 0}, 0.13, 0.13, "pelvis", false, -1, 1, false, "pelvis"});
  t.push_back({"spine1", "pelvis", {0, 1.05, 0}, {0, 1.20, 0}, 0.125, 0.125, "spine1", true, -1, 1, false, "spine1"});
  t.push_back({"spine2", "spine1", {0, 1.20, 0}, {0, 1.35, 0}, 0.135, 0.14, "spine2", true, -1, 1, false, "spine2"});
  t.push_back({"spine3", "spine2", {0, 1.35, 0}, {0, 1.50, 0}, 0.145, 0.13, "spine3", true, -1, 1, false, "spine3"});
  t.push_back({"neck", "spine3", {0, 1.50, 0}, {0, 1.60, 0}, 0.05, 0.05, "neck", false, -1, 1, false, "neck"});
  t.push_back({"head", "neck", {0, 1.60, 0}, {0, 1.82, 0}, 0.085, 0.075, "head", false, -1, 1, false, "head"});
  t.push_back({"jaw", "head", {0, 1.62, 0.03}, {0, 1.63, 0.11}, 0.03, 0.025, "jaw", false, -1, 1, false, "jaw"});

  for (Side s : {Side::kLeft, Side::kRight}) {
    const std::string p = side_prefix(s);
    auto X = [&](Vec3 v) { return s == Side::kLeft ? v : mirror_x(v); };
    t.push_back({p + "hip", "pelvis", X({0.09, 0.92, 0}), X({0.10, 0.50, 0}), 0.075, 0.055, p + "thigh", false, -1, 1, false, "hip"});
    t.push_back({p + "knee", p + "hip", X({0.10, 0.50, 0}), X({0.10, 0.10, 0}), 0.05, 0.04, p + "calf", false, -1, 1, false, "knee"});
    t.push_back({p + "ankle", p + "knee", X({0.10, 0.10, 0}), X({0.10, 0.04, 0.12}), 0.04, 0.035, p + "foot", false, -1, 1, false, "ankle"});
    t.push_back({p + "foot", p + "ankle", X({0.10, 0.04, 0.12}), X({0.10, 0.03, 0.19}), 0.032, 0.025, p + "toes", false, -1, 1, false, "foot"});
  }
  for (Side s : {Side::kLeft, Side::kRight}) {
    const std::string p = side_prefix(s);
    auto X = [&](Vec3 v) { return s == Side::kLeft ? v : mirror_x(v); };
    t.push_back({p + "collar", "spine3", X({0.04, 1.45, 0}), X({0.17, 1.46, 0}), 0.045, 0.045, p + "collar", false, -1, 1, false, "collar"});
    t.push_back({p + "shoulder", p + "collar", X({0.17, 1.46, 0}), X({0.44, 1.46, 0}), 0.05, 0.04, p + "upper_arm", false, -1, 1, false, "shoulder"});
    t.push_back({p + "elbow", p + "shoulder", X({0.44, 1.46, 0}), X({0.69, 1.46, 0}), 0.038, 0.03, p + "forearm", false, -1, 1, false, "elbow"});
    t.push_back({p + "wrist", p + "elbow", X({0.69, 1.46, 0}), X({0.78, 1.46, 0}), 0.03, 0.028, p + "palm", false, -1, 1, false, "wrist"});

    // Finger chains hang off the palm.
    const Vec3 bases[5] = {{0.72, 1.455, 0.03}, {0.785, 1.46, 0.021}, {0.79, 1.46, 0.007}, {0.785, 1.46, -0.007}, {0.775, 1.46, -0.021}};
    const Vec3 dirs[5] = {Vec3(0.6, 0.0, 0.8).normalized(), Vec3::UnitX(), Vec3::UnitX(), Vec3::UnitX(), Vec3::UnitX()};
    const double lengths[5] = {0.09, 0.08, 0.09, 0.083, 0.068};
    const double radii[5] = {0.0075, 0.0066, 0.0068, 0.0066, 0.006};
    for (int f = 0; f < 5; ++f) {
      const double seg = lengths[f] / finger_segments;
      std::string parent = p + "wrist";
      for (int k = 0; k < finger_segments; ++k) {
        const Vec3 a = bases[f] + dirs[f] * (seg * k);
        const Vec3 b = bases[f] + dirs[f] * (seg * (k + 1));
        const double ra = radii[f] * (1.0 - 0.12 * k);
        const double rb = radii[f] * (1.0 - 0.12 * (k + 1));
        const std::string name = p + kFingers[f] + std::to_string(k + 1);
        t.push_back({name, parent, X(a), X(b), ra, rb, p + kFingers[f], false, k, finger_segments, true,
                     std::string(kFingers[f]) + std::to_string(k + 1)});
        parent = name;
      }
    }
  }
  return t;
}

struct Builder {
  BodyModel model;
  std::map<std::string, int> part_ids;
  std::map<std::string, int> joint_ids;
  std::vector<std::vector<int>> ring0;  // per joint: first-ring vertex ids
  std::vector<Vec3> axis;               // per joint tube axis

  int add_vertex(const Vec3& p, std::vector<Influence> w, std::vector<Vec3>& verts) {
    verts.push_back(p);
    model.skinning.push_back(std::move(w));
    return static_cast<int>(verts.size()) - 1;
  }
};

// Skinning weights along a tube: blend with the parent near the start.
std::vector<Influence> tube_weights(int joint, int parent, double t) {
  if (parent < 0) return {{joint, 1.0}};
  const double wp = 0.5 * std::max(0.0, 1.0 - t / 0.3);
  if (wp <= 0.0) return {{joint, 1.0}};
  return {{parent, wp}, {joint, 1.0 - wp}};
}

}  // namespace

int minimum_vertex_budget(const HumanoidConfig& cfg) {
  const int body_tubes = 23;
  const int finger_tubes = 10 * cfg.finger_segments;
  return body_tubes * (cfg.body_sides * 2 + 2) + finger_tubes * (cfg.finger_sides * 2 + 2);
}

BodyModel make_procedural_humanoid(const HumanoidConfig& cfg) {
  if (cfg.finger_segments < 1) throw ValidationError("finger_segments must be >= 1");
  if (cfg.body_sides < 4 || cfg.body_sides % 2 != 0) throw ValidationError("body_sides must be even and >= 4");
  if (cfg.finger_sides < 3) throw ValidationError("finger_sides must be >= 3");
  if (cfg.shape_components < 0) throw ValidationError("shape_components must be >= 0");
  const int finger_dof = 3 * 5 * cfg.finger_segments;
  if (cfg.hand_components < 1 || cfg.hand_components > finger_dof)
    throw ValidationError("hand_components must be in [1, " + std::to_string(finger_dof) + "]");

  const std::vector<TubeSpec> tubes = skeleton(cfg.finger_segments);
  const int finger_tubes = 10 * cfg.finger_segments;
  const int body_tubes = static_cast<int>(tubes.size()) - finger_tubes;
  const int finger_verts = finger_tubes * (cfg.finger_sides * 2 + 2);
  const int body_rings = ((cfg.vertex_budget - finger_verts) / body_tubes - 2) / cfg.body_sides;
  if (cfg.vertex_budget < minimum_vertex_budget(cfg) || body_rings < 2) {
    throw ValidationError("vertex budget " + std::to_string(cfg.vertex_budget) + " too small to allocate all parts (need >= " +
                          std::to_string(minimum_vertex_budget(cfg)) + ")");
  }

  Builder b;
  BodyModel& m = b.model;
  const std::vector<PartSpec> pspecs = part_table();
  for (const PartSpec& ps : pspecs) {
    b.part_ids[ps.name] = m.num_parts();
    m.parts.push_back({ps.name, ps.side, ps.hand, -1, ps.region});
  }
  for (Part& p : m.parts) {
    if (p.side == Side::kCenter) continue;
    std::string other;
    if (p.name.rfind("left_", 0) == 0) other = "right_" + p.name.substr(5);
    else if (p.name.rfind("right_", 0) == 0) other = "left_" + p.name.substr(6);
    else if (p.name.size() > 5 && p.name.compare(p.name.size() - 5, 5, "_left") == 0) other = p.name.substr(0, p.name.size() - 5) + "_right";
    else if (p.name.size() > 6 && p.name.compare(p.name.size() - 6, 6, "_right") == 0) other = p.name.substr(0, p.name.size() - 6) + "_left";
    p.mirror = b.part_ids.at(other);
  }

  for (const TubeSpec& t : tubes) {
    b.joint_ids[t.joint] = m.num_joints();
    m.joint_names.push_back(t.joint);
    m.parents.push_back(t.parent.empty() ? -1 : b.joint_ids.at(t.parent));
  }
  const int J = m.num_joints();
  b.ring0.resize(J);
  b.axis.resize(J);

  std::vector<Vec3> verts;
  for (int j = 0; j < J; ++j) {
    const TubeSpec& t = tubes[j];
    const int parent = m.parents[j];
    const int sides = t.finger ? cfg.finger_sides : cfg.body_sides;
    const int rings = t.finger ? 2 : body_rings;
    const Vec3 d = (t.end - t.start).normalized();
    b.axis[j] = d;
    const Vec3 ref = std::abs(d.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
    const Vec3 e1 = (ref - ref.dot(d) * d).normalized();
    const Vec3 e2 = d.cross(e1);

    // Vertices: rings x sides, then the two cap centres.
    std::vector<std::vector<int>> ring_ids(rings, std::vector<int>(sides));
    for (int r = 0; r < rings; ++r) {
      const double tt = static_cast<double>(r) / (rings - 1);
      const Vec3 c = t.start + tt * (t.end - t.start);
      const double rad = t.r0 + tt * (t.r1 - t.r0);
      for (int k = 0; k < sides; ++k) {
        const double phi = 2.0 * M_PI * k / sides;
        ring_ids[r][k] = b.add_vertex(c + rad * (std::cos(phi) * e1 + std::sin(phi) * e2), tube_weights(j, parent, tt), verts);
      }
    }
    const int cap0 = b.add_vertex(t.start, tube_weights(j, parent, 0.0), verts);
    const int cap1 = b.add_vertex(t.end, tube_weights(j, parent, 1.0), verts);
    b.ring0[j] = ring_ids[0];

    // uv chart layout: caps in v-bands [0,0.1] and [0.9,1], the barrel in between.
    auto chart_v = [&](double v) {
      if (t.finger_band < 0) return v;
      return (t.finger_band + v) / t.finger_bands;
    };
    const int cols = t.split ? sides / 2 : sides;
    auto part_of_column = [&](int k) {
      if (!t.split) return b.part_ids.at(t.part);
      // Columns with sin(phi) >= 0 lie on +x, the model's left.
      return b.part_ids.at(t.part + (k < sides / 2 ? "_left" : "_right"));
    };
    auto column_u = [&](int k) {
      const int local = t.split ? k % (sides / 2) : k;
      return static_cast<double>(local) / cols;
    };
    auto add_face = [&](std::array<int, 3> f, std::array<Vec2, 3> uv, int part) {
      m.faces.push_back(f);
      m.corner_uvs.push_back(uv);
      m.face_part.push_back(part);
    };
    for (int k = 0; k < sides; ++k) {
      const int k1 = (k + 1) % sides;
      const int part = part_of_column(k);
      const double u0 = column_u(k);
      const double u1 = u0 + 1.0 / cols;
      for (int r = 0; r + 1 < rings; ++r) {
        const double v0 = chart_v(0.1 + 0.8 * r / (rings - 1));
        const double v1 = chart_v(0.1 + 0.8 * (r + 1) / (rings - 1));
        const int a = ring_ids[r][k], bb = ring_ids[r][k1], c = ring_ids[r + 1][k1], dd = ring_ids[r + 1][k];
        add_face({a, bb, c}, {Vec2(u0, v0), Vec2(u1, v0), Vec2(u1, v1)}, part);
        add_face({a, c, dd}, {Vec2(u0, v0), Vec2(u1, v1), Vec2(u0, v1)}, part);
      }
      const double um = 0.5 * (u0 + u1);
      add_face({cap0, ring_ids[0][k1], ring_ids[0][k]}, {Vec2(um, chart_v(0.02)), Vec2(u1, chart_v(0.1)), Vec2(u0, chart_v(0.1))}, part);
      add_face({cap1, ring_ids[rings - 1][k], ring_ids[rings - 1][k1]},
               {Vec2(um, chart_v(0.98)), Vec2(u0, chart_v(0.9)), Vec2(u1, chart_v(0.9))}, part);
    }
  }

  const int V = static_cast<int>(verts.size());
  m.template_vertices.resize(V, 3);
  for (int i = 0; i < V; ++i) m.template_vertices.row(i) = verts[i].transpose();

  // Joint = centroid of the first ring of its tube.
  m.joint_regressor.resize(J);
  for (int j = 0; j < J; ++j) {
    const double w = 1.0 / static_cast<double>(b.ring0[j].size());
    for (int v : b.ring0[j]) m.joint_regressor[j].push_back({v, w});
  }

  for (int j = 1; j < J; ++j)
    if (!tubes[j].finger) m.pose_joints.push_back(j);
  m.wrist_joints = {b.joint_ids.at("left_wrist"), b.joint_ids.at("right_wrist")};

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  // Shape basis: per joint class a bone-length scale and a girth scale.
  // Component 0 is stature, component 1 girth, the rest random but
  // left/right symmetric.
  const Points3 rest = regress_joints(m, m.template_vertices);
  const int B = cfg.shape_components;
  m.shape_basis = Eigen::MatrixXd::Zero(3 * static_cast<Eigen::Index>(V), B);
  std::vector<int> tube_of_vertex(V, 0);
  {
    int cursor = 0;
    for (int j = 0; j < J; ++j) {
      const int sides = tubes[j].finger ? cfg.finger_sides : cfg.body_sides;
      const int rings = tubes[j].finger ? 2 : body_rings;
      const int n = sides * rings + 2;
      for (int i = 0; i < n; ++i) tube_of_vertex[cursor + i] = j;
      cursor += n;
    }
  }
  for (int k = 0; k < B; ++k) {
    std::map<std::string, std::pair<double, double>> klass;
    for (const TubeSpec& t : tubes) {
      if (klass.count(t.symmetry)) continue;
      double len = 0.0, girth = 0.0;
      if (k == 0) len = 0.08;
      else if (k == 1) girth = 0.12;
      else {
        len = 0.04 * normal(rng);
        girth = 0.06 * normal(rng);
      }
      klass[t.symmetry] = {len, girth};
    }
    std::vector<Vec3> dj(J, Vec3::Zero());
    for (int j = 1; j < J; ++j) {
      const int p = m.parents[j];
      dj[j] = dj[p] + klass.at(tubes[p].symmetry).first * (rest.row(j) - rest.row(p)).transpose();
    }
    for (int i = 0; i < V; ++i) {
      const int j = tube_of_vertex[i];
      const auto [len, girth] = klass.at(tubes[j].symmetry);
      const Vec3 local = m.template_vertices.row(i).transpose() - rest.row(j).transpose();
      const Vec3 axial = local.dot(b.axis[j]) * b.axis[j];
      const Vec3 disp = dj[j] + len * axial + girth * (local - axial);
      m.shape_basis.block<3, 1>(3 * static_cast<Eigen::Index>(i), k) = disp;
    }
  }

  // Hand PCA from random smooth finger curls.
  const int S = cfg.finger_segments;
  for (int s = 0; s < 2; ++s) {
    const std::string p = s == 0 ? "left_" : "right_";
    HandPca& pca = m.hand_pca[s];
    for (int f = 0; f < 5; ++f)
      for (int k = 0; k < S; ++k) pca.joints.push_back(b.joint_ids.at(p + kFingers[f] + std::to_string(k + 1)));
    const Vec3 palm_normal = -Vec3::UnitY();
    const int D = 3 * static_cast<int>(pca.joints.size());
    const int N = 400;
    Eigen::MatrixXd X(N, D);
    for (int n = 0; n < N; ++n) {
      const double fist = uniform(rng);
      for (int f = 0; f < 5; ++f) {
        const double curl = std::clamp(1.1 * fist + 0.35 * normal(rng), -0.2, 1.5);
        const double spread = 0.12 * normal(rng);
        for (int k = 0; k < S; ++k) {
          const int j = pca.joints[f * S + k];
          const Vec3 bend_axis = b.axis[j].cross(palm_normal).normalized();
          const double profile = (S == 1) ? 1.0 : 1.0 - 0.3 * k / (S - 1);
          Vec3 r = curl * profile * bend_axis;
          if (k == 0) r += spread * palm_normal;
          X.block(n, 3 * (f * S + k), 1, 3) = r.transpose();
        }
      }
    }
    pca.mean = X.colwise().mean().transpose();
    const Eigen::MatrixXd centered = X.rowwise() - pca.mean.transpose();
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(N);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    pca.components.resize(D, cfg.hand_components);
    for (int c = 0; c < cfg.hand_components; ++c) {
      Eigen::VectorXd col = eig.eigenvectors().col(D - 1 - c);
      Eigen::Index arg;
      col.cwiseAbs().maxCoeff(&arg);
      if (col[arg] < 0) col = -col;
      pca.components.col(c) = col;
    }
  }

  validate_model(m);
  return m;
}

}  // namespace proxyfit
