#pragma once

#include <optional>
#include <vector>

#include "proxyfit/body_model.hpp"

namespace proxyfit {

struct UvHit {
  int face = -1;
  Vec3 bary = Vec3::Zero();
};

// Barycentric coordinates of `p` in the 2-D triangle `tri`; nullopt for a
// degenerate triangle.
std::optional<Vec3> barycentric_2d(const Vec2& p, const std::array<Vec2, 3>& tri);

// Per-part uniform grid over [0,1]^2 bucketing the part's uv triangles.
class UvIndex {
 public:
  static constexpr double kInsideTol = 1e-7;

  // Throws ValidationError when two triangles of one part overlap.
  UvIndex(const BodyModel& model, int grid_resolution = 32);

  // Face whose uv triangle contains `uv` (every barycentric >= -kInsideTol).
  // Among several, the one with the largest minimum barycentric wins, then
  // the lowest face id.
  std::optional<UvHit> lookup(int part, const Vec2& uv) const;

  // lookup(), falling back to the closest triangle of `part` when it lies
  // within `max_distance` in uv units. The returned barycentrics are those of
  // the closest point, so they always sit in the simplex.
  std::optional<UvHit> lookup_nearest(int part, const Vec2& uv, double max_distance) const;

  int grid_resolution() const { return grid_; }
  const std::vector<int>& cell(int part, int cx, int cy) const;

 private:
  const BodyModel* model_;
  int grid_;
  std::vector<std::vector<std::vector<int>>> cells_;  // [part][cy * grid + cx]
};

// Reference scan over every face of `part`, same selection rule as
// UvIndex::lookup.
std::optional<UvHit> brute_force_uv_lookup(const BodyModel& model, int part, const Vec2& uv);

}  // namespace proxyfit
