#pragma once

#include <array>
#include <vector>

#include "proxyfit/body_model.hpp"
#include "proxyfit/camera.hpp"
#include "proxyfit/proxy.hpp"

namespace proxyfit {

// Proxy plus the per-pixel visibility buffers behind it.
struct RenderResult {
  Proxy proxy;
  std::vector<int> face;                   // winning face per pixel, -1 = none
  std::vector<std::array<double, 3>> bary;  // perspective-correct barycentrics of `face`
  std::vector<double> depth;               // camera-space z, +inf = none
};

// Near-plane distance; triangles with a vertex closer than this are skipped.
inline constexpr double kNearPlane = 1e-3;

// Z-buffered rasterisation at the camera's resolution. Pixel centres sit at
// (i + 0.5, j + 0.5); shared edges follow the top-left fill rule. Both
// windings are drawn.
RenderResult render(const PosedMesh& mesh, const BodyModel& model, const Camera& cam, const Palette& palette);

Proxy rasterize(const PosedMesh& mesh, const BodyModel& model, const Camera& cam, const Palette& palette);

}  // namespace proxyfit
