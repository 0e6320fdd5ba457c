#include "proxyfit/rotation.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace proxyfit {

namespace {
constexpr double kSeriesThreshold = 1e-4;
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Mat3 rodrigues(const Vec3& r) {
  const double theta = r.norm();
  const Mat3 K = skew(r);
  if (theta < kSeriesThreshold) {
    return Mat3::Identity() + K + 0.5 * K * K;
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Mat3::Identity() + a * K + b * K * K;
}

std::array<Mat3, 3> rodrigues_jacobian(const Vec3& r) {
  std::array<Mat3, 3> out;
  const double theta2 = r.squaredNorm();
  if (std::sqrt(theta2) < kSeriesThreshold) {
    // d/dr_k of I + [r] + 0.5 [r]^2
    const Mat3 K = skew(r);
    for (int k = 0; k < 3; ++k) {
      const Mat3 Ek = skew(Vec3::Unit(k));
      out[k] = Ek + 0.5 * (Ek * K + K * Ek);
    }
    return out;
  }
  // dR/dr_k = (r_k [r]x + [r x (I - R) e_k]x) / |r|^2 * R
  const Mat3 R = rodrigues(r);
  const Mat3 K = skew(r);
  const Mat3 I_minus_R = Mat3::Identity() - R;
  for (int k = 0; k < 3; ++k) {
    const Vec3 col = r.cross(I_minus_R.col(k));
    out[k] = ((r[k] * K + skew(col)) / theta2) * R;
  }
  return out;
}

Vec3 rotation_log(const Mat3& R) {
  const Eigen::AngleAxisd aa(R);
  Vec3 out = aa.axis() * aa.angle();
  if (!out.allFinite()) return Vec3::Zero();
  return out;
}

Vec3 canonicalize_axis_angle(const Vec3& r) {
  const double theta = r.norm();
  if (theta < M_PI) return r;
  const double two_pi = 2.0 * M_PI;
  double wrapped = std::fmod(theta, two_pi);
  const Vec3 axis = r / theta;
  if (wrapped > M_PI) return axis * (wrapped - two_pi);
  return axis * wrapped;
}

}  // namespace proxyfit
