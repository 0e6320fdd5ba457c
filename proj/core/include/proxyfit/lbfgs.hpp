#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace proxyfit {

// Returns f(x); writes the gradient into *grad when non-null.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 30;
  double rel_decrease = 0.01;  // stop once (f_prev - f) / |f_prev| drops below this (from step 2 on)
  double initial_step = 1e-2;  // length of the first step, taken along -grad
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_evaluations_per_search = 25;
};

enum class StopReason { kConverged, kMaxIterations, kLineSearch, kZeroGradient, kDiverged };

std::string to_string(StopReason reason);

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  std::vector<double> trajectory;  // f at the start and after every accepted step
  int iterations = 0;
  int evaluations = 0;
  StopReason reason = StopReason::kMaxIterations;
};

// Limited-memory BFGS with a strong-Wolfe line search. Every accepted step
// satisfies the sufficient-decrease condition, so `trajectory` is
// non-increasing.
LbfgsResult minimize_lbfgs(const Objective& f, const Eigen::VectorXd& x0, const LbfgsOptions& options = {});

}  // namespace proxyfit
