#include "proxyfit/uv_index.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "proxyfit/error.hpp"

namespace proxyfit {

std::optional<Vec3> barycentric_2d(const Vec2& p, const std::array<Vec2, 3>& tri) {
  const Vec2 e1 = tri[1] - tri[0];
  const Vec2 e2 = tri[2] - tri[0];
  const double det = e1.x() * e2.y() - e1.y() * e2.x();
  if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
  const Vec2 d = p - tri[0];
  const double l1 = (d.x() * e2.y() - d.y() * e2.x()) / det;
  const double l2 = (e1.x() * d.y() - e1.y() * d.x()) / det;
  return Vec3(1.0 - l1 - l2, l1, l2);
}

namespace {

// Keeps the better of two candidate hits under the documented rule.
void consider(std::optional<UvHit>& best, double& best_min, int face, const Vec3& bary) {
  const double m = bary.minCoeff();
  if (m < -UvIndex::kInsideTol) return;
  if (!best || m > best_min || (m == best_min && face < best->face)) {
    best = UvHit{face, bary};
    best_min = m;
  }
}

// Closest point of triangle `tri` to `p`, as barycentrics.
Vec3 closest_bary(const Vec2& p, const std::array<Vec2, 3>& tri) {
  const Vec2 &a = tri[0], &b = tri[1], &c = tri[2];
  const Vec2 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return {1, 0, 0};
  const Vec2 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return {0, 1, 0};
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    const double v = d1 / (d1 - d3);
    return {1 - v, v, 0};
  }
  const Vec2 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return {0, 0, 1};
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    const double w = d2 / (d2 - d6);
    return {1 - w, 0, w};
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {0, 1 - w, w};
  }
  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return {1 - v - w, v, w};
}

}  // namespace

UvIndex::UvIndex(const BodyModel& model, int grid_resolution) : model_(&model), grid_(grid_resolution) {
  if (grid_ < 1) throw ValidationError("uv index grid resolution must be >= 1");
  for (int p = 0; p < model.num_parts(); ++p) {
    if (auto overlap = find_uv_overlap(model, p)) {
      throw ValidationError("uv triangles overlap in part '" + model.parts[p].name + "' (faces " +
                            std::to_string(overlap->first) + " and " + std::to_string(overlap->second) + ")");
    }
  }
  cells_.assign(model.num_parts(), std::vector<std::vector<int>>(static_cast<size_t>(grid_) * grid_));
  constexpr double kPad = 1e-6;
  for (int f = 0; f < model.num_faces(); ++f) {
    const auto& tri = model.corner_uvs[f];
    double u0 = tri[0].x(), u1 = u0, v0 = tri[0].y(), v1 = v0;
    for (int k = 1; k < 3; ++k) {
      u0 = std::min(u0, tri[k].x());
      u1 = std::max(u1, tri[k].x());
      v0 = std::min(v0, tri[k].y());
      v1 = std::max(v1, tri[k].y());
    }
    auto to_cell = [&](double t) { return std::clamp(static_cast<int>(std::floor(t * grid_)), 0, grid_ - 1); };
    const int cx0 = to_cell(u0 - kPad), cx1 = to_cell(u1 + kPad);
    const int cy0 = to_cell(v0 - kPad), cy1 = to_cell(v1 + kPad);
    auto& part_cells = cells_[model.face_part[f]];
    for (int cy = cy0; cy <= cy1; ++cy)
      for (int cx = cx0; cx <= cx1; ++cx) part_cells[static_cast<size_t>(cy) * grid_ + cx].push_back(f);
  }
}

const std::vector<int>& UvIndex::cell(int part, int cx, int cy) const {
  return cells_.at(part).at(static_cast<size_t>(cy) * grid_ + cx);
}

std::optional<UvHit> UvIndex::lookup(int part, const Vec2& uv) const {
  if (part < 0 || part >= static_cast<int>(cells_.size()) || !uv.allFinite()) return std::nullopt;
  const int cx = std::clamp(static_cast<int>(std::floor(uv.x() * grid_)), 0, grid_ - 1);
  const int cy = std::clamp(static_cast<int>(std::floor(uv.y() * grid_)), 0, grid_ - 1);
  std::optional<UvHit> best;
  double best_min = 0.0;
  for (int f : cells_[part][static_cast<size_t>(cy) * grid_ + cx]) {
    if (auto b = barycentric_2d(uv, model_->corner_uvs[f])) consider(best, best_min, f, *b);
  }
  return best;
}

std::optional<UvHit> UvIndex::lookup_nearest(int part, const Vec2& uv, double max_distance) const {
  if (auto hit = lookup(part, uv)) return hit;
  if (part < 0 || part >= static_cast<int>(cells_.size()) || !uv.allFinite()) return std::nullopt;
  auto to_cell = [&](double t) { return std::clamp(static_cast<int>(std::floor(t * grid_)), 0, grid_ - 1); };
  const int cx0 = to_cell(uv.x() - max_distance), cx1 = to_cell(uv.x() + max_distance);
  const int cy0 = to_cell(uv.y() - max_distance), cy1 = to_cell(uv.y() + max_distance);
  std::optional<UvHit> best;
  double best_d2 = max_distance * max_distance;
  for (int cy = cy0; cy <= cy1; ++cy) {
    for (int cx = cx0; cx <= cx1; ++cx) {
      for (int f : cells_[part][static_cast<size_t>(cy) * grid_ + cx]) {
        const auto& tri = model_->corner_uvs[f];
        const Vec3 b = closest_bary(uv, tri);
        const double d2 = (b[0] * tri[0] + b[1] * tri[1] + b[2] * tri[2] - uv).squaredNorm();
        if (d2 < best_d2 || (best && d2 == best_d2 && f < best->face)) {
          best = UvHit{f, b};
          best_d2 = d2;
        }
      }
    }
  }
  return best;
}

std::optional<UvHit> brute_force_uv_lookup(const BodyModel& model, int part, const Vec2& uv) {
  std::optional<UvHit> best;
  double best_min = 0.0;
  for (int f = 0; f < model.num_faces(); ++f) {
    if (model.face_part[f] != part) continue;
    if (auto b = barycentric_2d(uv, model.corner_uvs[f])) consider(best, best_min, f, *b);
  }
  return best;
}

}  // namespace proxyfit
