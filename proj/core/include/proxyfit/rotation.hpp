#pragma once

#include <array>

#include <Eigen/Core>

namespace proxyfit {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

Mat3 skew(const Vec3& v);

// Axis-angle -> rotation matrix (Rodrigues). Small angles use the
// second-order series so the result and its Jacobian stay consistent.
Mat3 rodrigues(const Vec3& axis_angle);

// dR/dr_k for k = 0..2, evaluated at `axis_angle`.
std::array<Mat3, 3> rodrigues_jacobian(const Vec3& axis_angle);

// Rotation matrix -> axis-angle with |r| <= pi.
Vec3 rotation_log(const Mat3& R);

// Maps any axis-angle onto the equivalent one with |r| < pi
// (|r| == pi is kept as is).
Vec3 canonicalize_axis_angle(const Vec3& axis_angle);

// <A, B>_F
inline double frobenius_dot(const Mat3& a, const Mat3& b) { return (a.array() * b.array()).sum(); }

}  // namespace proxyfit
