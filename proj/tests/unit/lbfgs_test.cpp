#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "fit_fixtures.hpp"
#include "proxyfit/fitter.hpp"
#include "proxyfit/lbfgs.hpp"

using namespace proxyfit;

namespace {

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd* g) {
  const double a = 1 - x[0], b = x[1] - x[0] * x[0];
  if (g) {
    g->resize(2);
    (*g)[0] = -2 * a - 400 * x[0] * b;
    (*g)[1] = 200 * b;
  }
  return a * a + 100 * b * b;
}

void expect_monotone(const LbfgsResult& r) {
  for (size_t i = 1; i < r.trajectory.size(); ++i) EXPECT_LE(r.trajectory[i], r.trajectory[i - 1]);
}

}  // namespace

TEST(Lbfgs, Rosenbrock) {
  LbfgsOptions o;
  o.max_iterations = 500;
  o.rel_decrease = 1e-14;
  o.initial_step = 0.1;
  const LbfgsResult r = minimize_lbfgs(rosenbrock, Eigen::Vector2d(-1.2, 1.0), o);
  EXPECT_LT((r.x - Eigen::Vector2d(1, 1)).norm(), 1e-5) << to_string(r.reason);
  expect_monotone(r);
}

TEST(Lbfgs, QuadraticBowl) {
  Eigen::MatrixXd A(4, 4);
  A << 4, 1, 0, 0, 1, 3, 0.5, 0, 0, 0.5, 2, 0.1, 0, 0, 0.1, 1;
  const Eigen::VectorXd b = Eigen::Vector4d(1, -2, 0.5, 3);
  auto f = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (g) *g = A * x - b;
    return 0.5 * x.dot(A * x) - b.dot(x);
  };
  LbfgsOptions o;
  o.max_iterations = 100;
  o.rel_decrease = 1e-15;
  const LbfgsResult r = minimize_lbfgs(f, Eigen::VectorXd::Zero(4), o);
  EXPECT_LT((r.x - A.ldlt().solve(b)).norm(), 1e-7);
  expect_monotone(r);
  EXPECT_EQ(r.trajectory.front(), 0.0);
}

TEST(Lbfgs, FirstStepHasConfiguredLength) {
  auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (g) *g = x;
    return 0.5 * x.squaredNorm();
  };
  LbfgsOptions o;
  o.max_iterations = 1;
  o.initial_step = 0.25;
  const Eigen::VectorXd x0 = Eigen::Vector3d(3, 0, 4);
  const LbfgsResult r = minimize_lbfgs(f, x0, o);
  // Along -grad the first trial is accepted when it already satisfies both
  // Wolfe conditions, otherwise it is expanded; it never shrinks here.
  EXPECT_GE((r.x - x0).norm(), 0.25 - 1e-12);
  EXPECT_LT(r.value, 12.5);
}

TEST(Lbfgs, ZeroGradientStopsImmediately) {
  auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (g) *g = Eigen::VectorXd::Zero(x.size());
    return 1.0;
  };
  const LbfgsResult r = minimize_lbfgs(f, Eigen::VectorXd::Ones(3));
  EXPECT_EQ(r.reason, StopReason::kZeroGradient);
  EXPECT_EQ(r.iterations, 0);
}

TEST(Lbfgs, NonFiniteObjectiveIsReported) {
  auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (g) *g = Eigen::VectorXd::Ones(x.size());
    return x[0] < 0.5 ? std::nan("") : x[0];
  };
  const LbfgsResult r = minimize_lbfgs(f, Eigen::VectorXd::Ones(1));
  EXPECT_TRUE(r.reason == StopReason::kDiverged || r.reason == StopReason::kLineSearch) << to_string(r.reason);
  EXPECT_TRUE(std::isfinite(r.value));
}

TEST(Lbfgs, FitIsInvariantToWeightScaling) {
  fixture::Problem p = fixture::clean_problem(4, 3, false);
  PoseParams init = p.scene.gt_params;
  init.translation += Vec3(0.05, -0.03, 0.02);
  init.global_rot += Vec3(0.0, 0.1, 0.0);
  FitConfig cfg;
  cfg.stages = {default_stages()[0]};
  const FitReport base = fit(p.scene.model, p.inputs.views, p.corrs, init, cfg);
  for (double c : {2.0, 3.7}) {
    std::vector<Correspondence> scaled = p.corrs;
    for (auto& k : scaled) k.weight *= c;
    const FitReport r = fit(p.scene.model, p.inputs.views, scaled, init, cfg);
    const double tol = c == 2.0 ? 0.0 : 1e-10;
    EXPECT_LE((r.params.translation - base.params.translation).cwiseAbs().maxCoeff(), tol) << "c=" << c;
    EXPECT_LE((r.params.global_rot - base.params.global_rot).cwiseAbs().maxCoeff(), tol) << "c=" << c;
    EXPECT_EQ(r.stages[0].iterations, base.stages[0].iterations);
  }
}
