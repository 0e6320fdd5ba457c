#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "proxyfit/rotation.hpp"

namespace proxyfit {

using Points3 = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

enum class Side { kCenter, kLeft, kRight };
enum class HandSide { kLeft = 0, kRight = 1 };

HandSide parse_hand_side(std::string_view name);
std::string_view to_string(Side side);
Side parse_side(std::string_view name);

struct Part {
  std::string name;
  Side side = Side::kCenter;
  bool hand = false;
  int mirror = -1;     // left/right counterpart, -1 if none
  std::string region;  // coarse group ("left_leg", "torso", ...) used by region flips

  bool operator==(const Part&) const = default;
};

struct Influence {
  int index = 0;
  double weight = 0.0;

  bool operator==(const Influence&) const = default;
};

// Finger articulation subspace for one hand.
struct HandPca {
  std::vector<int> joints;     // finger joints, 3 axis-angle dof each
  Eigen::VectorXd mean;        // 3 * joints.size()
  Eigen::MatrixXd components;  // (3 * joints.size()) x P, orthonormal columns

  int num_components() const { return static_cast<int>(components.cols()); }
};

// Skinned template mesh. Joints are stored in topological order
// (parents[j] < j, joint 0 is the root).
struct BodyModel {
  Points3 template_vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<std::array<Vec2, 3>> corner_uvs;  // per face corner
  std::vector<int> face_part;
  std::vector<Part> parts;

  std::vector<std::string> joint_names;
  std::vector<int> parents;                             // -1 for the root
  std::vector<std::vector<Influence>> joint_regressor;  // per joint, over vertices
  std::vector<std::vector<Influence>> skinning;         // per vertex, over joints
  Eigen::MatrixXd shape_basis;                          // 3V x B, row 3*i + axis

  std::vector<int> pose_joints;       // joints driven by PoseParams::theta, in slot order
  std::array<int, 2> wrist_joints{};  // left, right; both appear in pose_joints
  std::array<HandPca, 2> hand_pca;    // left, right

  int num_vertices() const { return static_cast<int>(template_vertices.rows()); }
  int num_faces() const { return static_cast<int>(faces.size()); }
  int num_joints() const { return static_cast<int>(parents.size()); }
  int num_parts() const { return static_cast<int>(parts.size()); }
  int num_shape() const { return static_cast<int>(shape_basis.cols()); }
  int num_hand_components() const { return hand_pca[0].num_components(); }

  int find_part(std::string_view name) const;    // -1 if absent
  int find_joint(std::string_view name) const;   // -1 if absent
  int pose_slot(int joint) const;                // -1 if not pose-driven
  std::vector<int> hand_parts(HandSide side) const;
  std::vector<int> hand_joints(HandSide side) const;  // wrist + fingers

  bool operator==(const BodyModel&) const;
};

struct PoseParams {
  Eigen::VectorXd beta;
  Eigen::VectorXd theta;  // 3 per pose joint
  Eigen::VectorXd hand_left;
  Eigen::VectorXd hand_right;
  Vec3 global_rot = Vec3::Zero();
  Vec3 translation = Vec3::Zero();
  double scale = 1.0;

  static PoseParams zeros(const BodyModel& model);
  const Eigen::VectorXd& hand(HandSide side) const {
    return side == HandSide::kLeft ? hand_left : hand_right;
  }
  Eigen::VectorXd& hand(HandSide side) { return side == HandSide::kLeft ? hand_left : hand_right; }
  bool all_finite() const;
};

struct PosedMesh {
  Points3 vertices;
  Points3 joints;
};

// Intermediate quantities of one forward pass, kept for the backward pass.
struct SkinningState {
  Points3 shaped;       // template + shape displacement
  Points3 rest_joints;  // regressor applied to `shaped`
  std::vector<Mat3> local_rot;
  std::vector<std::array<Mat3, 3>> local_jac;  // valid for pose and finger joints
  std::vector<Mat3> chain_rot;                 // per joint, world-from-joint rotation
  std::vector<Vec3> chain_trans;
  Points3 skinned;  // before the global similarity
  Mat3 root_rot = Mat3::Identity();
  std::array<Mat3, 3> root_jac{};
  PosedMesh mesh;
};

// Throws Error on dimension mismatch or non-finite input.
void check_params(const BodyModel& model, const PoseParams& params);

// Per-finger-joint axis-angles (3 per joint) for one hand. `coeffs` may be
// shorter than P; missing trailing coefficients are treated as zero.
Eigen::VectorXd expand_hand_pose(const BodyModel& model, const Eigen::VectorXd& coeffs, HandSide side);

// vertices = s * R_global * LBS(shaped template, pose) + T. Scale is applied
// before translation.
PosedMesh forward(const BodyModel& model, const PoseParams& params);
SkinningState forward_state(const BodyModel& model, const PoseParams& params);

// Pulls dL/d(posed vertices) back onto every parameter block. The result
// has the layout of PoseParams (scale holds dL/ds).
PoseParams backward(const BodyModel& model, const PoseParams& params, const SkinningState& state,
                    const Points3& grad_vertices);

// Joint positions of the shaped template (regressor only, no pose).
Points3 regress_joints(const BodyModel& model, const Points3& vertices);

// Returns a pair of faces in `part` whose uv triangles have overlapping
// interiors, if any.
std::optional<std::pair<int, int>> find_uv_overlap(const BodyModel& model, int part);

// Overlap test for two 2-D triangles; touching edges/vertices do not count.
bool uv_triangles_overlap(const std::array<Vec2, 3>& a, const std::array<Vec2, 3>& b, double eps = 1e-9);

// Throws ValidationError naming the first violated invariant.
void validate_model(const BodyModel& model);

}  // namespace proxyfit
