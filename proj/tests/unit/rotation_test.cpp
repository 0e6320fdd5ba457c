#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "proxyfit/rotation.hpp"

using namespace proxyfit;

namespace {

Vec3 random_axis_angle(std::mt19937_64& rng, double max_angle) {
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.0, max_angle);
  return Vec3(n(rng), n(rng), n(rng)).normalized() * u(rng);
}

}  // namespace

TEST(Rotation, ZeroIsIdentity) { EXPECT_EQ(rodrigues(Vec3::Zero()), Mat3::Identity()); }

TEST(Rotation, MatchesAngleAxis) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const Vec3 r = random_axis_angle(rng, 3.1);
    EXPECT_LT((rodrigues(r) - oracle::axis_angle(r)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Rotation, SmallAnglesStayOrthonormal) {
  for (double a : {1e-4, 1e-7, 1e-10, 1e-14}) {
    const Mat3 R = rodrigues(Vec3(a, -2 * a, 0.5 * a));
    EXPECT_LT((R * R.transpose() - Mat3::Identity()).norm(), 1e-14);
    EXPECT_NEAR(R.determinant(), 1.0, 1e-14);
  }
}

TEST(Rotation, JacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  const double h = 1e-6;
  for (int i = 0; i < 50; ++i) {
    const Vec3 r = i < 5 ? Vec3(1e-9 * i, 0, -1e-9) : random_axis_angle(rng, 3.0);
    const auto J = rodrigues_jacobian(r);
    for (int k = 0; k < 3; ++k) {
      Vec3 a = r, b = r;
      a[k] += h;
      b[k] -= h;
      const Mat3 fd = (oracle::axis_angle(a) - oracle::axis_angle(b)) / (2 * h);
      EXPECT_LT((J[k] - fd).cwiseAbs().maxCoeff(), 1e-8) << "r=" << r.transpose() << " k=" << k;
    }
  }
}

TEST(Rotation, LogInvertsExp) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Vec3 r = random_axis_angle(rng, 3.1);
    EXPECT_LT((rotation_log(rodrigues(r)) - r).norm(), 1e-9);
  }
  EXPECT_EQ(rotation_log(Mat3::Identity()), Vec3::Zero());
}

TEST(Rotation, LogNearPi) {
  const double pi = std::acos(-1.0);
  const Vec3 r = Vec3(1, 2, -1).normalized() * pi;
  const Vec3 back = rotation_log(rodrigues(r));
  EXPECT_NEAR(back.norm(), pi, 1e-9);
  EXPECT_LT((rodrigues(back) - rodrigues(r)).norm(), 1e-9);
}

TEST(Rotation, CanonicalizeKeepsRotation) {
  const double pi = std::acos(-1.0);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const Vec3 axis = random_axis_angle(rng, 1.0).normalized();
    const Vec3 r = axis * (pi + 0.01 + 3.0 * i / 100.0);
    const Vec3 c = canonicalize_axis_angle(r);
    EXPECT_LE(c.norm(), pi + 1e-12);
    EXPECT_LT((rodrigues(c) - rodrigues(r)).norm(), 1e-9);
  }
  const Vec3 small(0.1, 0.2, 0.3);
  EXPECT_EQ(canonicalize_axis_angle(small), small);
}

TEST(Rotation, SkewIsCrossProduct) {
  const Vec3 a(1, -2, 3), b(0.5, 4, -1);
  EXPECT_LT((skew(a) * b - a.cross(b)).norm(), 1e-15);
}
