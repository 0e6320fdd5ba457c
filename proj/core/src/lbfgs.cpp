#include "proxyfit/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace proxyfit {

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kConverged: return "converged";
    case StopReason::kMaxIterations: return "max_iterations";
    case StopReason::kLineSearch: return "line_search";
    case StopReason::kZeroGradient: return "zero_gradient";
    case StopReason::kDiverged: return "diverged";
  }
  return "unknown";
}

namespace {

struct Point {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;  // directional derivative
  Eigen::VectorXd g;
};

class LineSearch {
 public:
  LineSearch(const Objective& f, const Eigen::VectorXd& x, const Eigen::VectorXd& d, const LbfgsOptions& o, int& evals)
      : f_(f), x_(x), d_(d), o_(o), evals_(evals) {}

  // Returns the accepted point, or alpha = 0 when no decrease was found.
  Point run(const Point& origin, double alpha0) {
    origin_ = origin;
    Point prev = origin;
    double alpha = alpha0;
    for (int i = 0; i < o_.max_evaluations_per_search; ++i) {
      Point p = eval(alpha);
      if (!armijo(p) || (i > 0 && p.f >= prev.f)) return zoom(prev, p);
      if (std::abs(p.slope) <= -o_.c2 * origin_.slope) return p;
      if (p.slope >= 0.0) return zoom(p, prev);
      prev = p;
      alpha *= 2.0;
    }
    return prev;
  }

 private:
  Point eval(double alpha) {
    Point p;
    p.alpha = alpha;
    p.g.resize(x_.size());
    ++evals_;
    ++used_;
    p.f = f_(x_ + alpha * d_, &p.g);
    p.slope = std::isfinite(p.f) ? p.g.dot(d_) : 0.0;
    return p;
  }

  bool armijo(const Point& p) const {
    return std::isfinite(p.f) && p.f <= origin_.f + o_.c1 * p.alpha * origin_.slope;
  }

  Point zoom(Point lo, Point hi) {
    while (used_ < o_.max_evaluations_per_search) {
      const double a = lo.alpha, b = hi.alpha;
      double trial = 0.5 * (a + b);
      if (std::isfinite(hi.f)) {
        // minimiser of the quadratic through (a, f_lo, slope_lo) and (b, f_hi)
        const double h = b - a;
        const double denom = 2.0 * (hi.f - lo.f - lo.slope * h);
        if (denom > 0.0) trial = a - lo.slope * h * h / denom;
      }
      const double lo_bound = std::min(a, b) + 0.1 * std::abs(b - a);
      const double hi_bound = std::max(a, b) - 0.1 * std::abs(b - a);
      trial = std::clamp(trial, lo_bound, hi_bound);
      Point p = eval(trial);
      if (!armijo(p) || p.f >= lo.f) {
        hi = p;
      } else {
        if (std::abs(p.slope) <= -o_.c2 * origin_.slope) return p;
        if (p.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = p;
      }
    }
    return lo;
  }

  const Objective& f_;
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& d_;
  const LbfgsOptions& o_;
  int& evals_;
  int used_ = 0;
  Point origin_;
};

}  // namespace

LbfgsResult minimize_lbfgs(const Objective& f, const Eigen::VectorXd& x0, const LbfgsOptions& o) {
  LbfgsResult res;
  res.x = x0;
  Eigen::VectorXd g(x0.size());
  res.value = f(res.x, &g);
  res.evaluations = 1;
  res.trajectory.push_back(res.value);
  if (!std::isfinite(res.value) || !g.allFinite()) {
    res.reason = StopReason::kDiverged;
    return res;
  }

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;  // (s, y)
  while (res.iterations < o.max_iterations) {
    if (g.isZero(0.0)) {
      res.reason = StopReason::kZeroGradient;
      return res;
    }
    // two-loop recursion
    Eigen::VectorXd q = g;
    std::vector<double> a(pairs.size());
    for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i) {
      const auto& [s, y] = pairs[i];
      a[i] = s.dot(q) / y.dot(s);
      q -= a[i] * y;
    }
    double alpha0 = 1.0;
    if (pairs.empty()) {
      alpha0 = o.initial_step / g.norm();
    } else {
      const auto& [s, y] = pairs.back();
      q *= s.dot(y) / y.dot(y);
    }
    for (size_t i = 0; i < pairs.size(); ++i) {
      const auto& [s, y] = pairs[i];
      const double b = y.dot(q) / y.dot(s);
      q += (a[i] - b) * s;
    }
    Eigen::VectorXd d = -q;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {  // lost descent; restart from steepest descent
      pairs.clear();
      d = -g;
      slope = -g.squaredNorm();
      alpha0 = o.initial_step / g.norm();
    }

    LineSearch search(f, res.x, d, o, res.evaluations);
    Point origin{0.0, res.value, slope, g};
    const Point p = search.run(origin, alpha0);
    if (p.alpha == 0.0 || !(p.f < res.value)) {
      res.reason = StopReason::kLineSearch;
      return res;
    }
    Eigen::VectorXd s = p.alpha * d;
    Eigen::VectorXd y = p.g - g;
    const double prev = res.value;
    res.x += s;
    res.value = p.f;
    g = p.g;
    ++res.iterations;
    res.trajectory.push_back(res.value);
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      pairs.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(pairs.size()) > o.memory) pairs.pop_front();
    }
    // the stop rule applies from the second step on
    if (res.iterations > 1 && (prev - res.value) < o.rel_decrease * std::abs(prev)) {
      res.reason = StopReason::kConverged;
      return res;
    }
  }
  res.reason = StopReason::kMaxIterations;
  return res;
}

}  // namespace proxyfit
