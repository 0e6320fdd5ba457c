#include "proxyfit/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace proxyfit {

namespace {

inline double edge(const Vec2& a, const Vec2& b, const Vec2& p) {
  return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
}

// For a positively oriented triangle (interior where every edge function
// is > 0) in y-down coordinates.
inline bool top_left(const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  return (d.y() == 0.0 && d.x() > 0.0) || d.y() < 0.0;
}

}  // namespace

RenderResult render(const PosedMesh& mesh, const BodyModel& model, const Camera& cam, const Palette& palette) {
  const int W = cam.width, H = cam.height;
  RenderResult out;
  out.proxy.seg = RgbImage(W, H);
  out.proxy.uv = RgbImage(W, H);
  out.face.assign(static_cast<size_t>(W) * H, -1);
  out.bary.assign(static_cast<size_t>(W) * H, {0.0, 0.0, 0.0});
  out.depth.assign(static_cast<size_t>(W) * H, std::numeric_limits<double>::infinity());

  const int V = static_cast<int>(mesh.vertices.rows());
  std::vector<Vec2> screen(V);
  std::vector<double> z(V);
  for (int i = 0; i < V; ++i) {
    const Vec3 pc = cam.to_camera(mesh.vertices.row(i).transpose());
    z[i] = pc.z();
    if (pc.z() > kNearPlane) screen[i] = Vec2(cam.fx * pc.x() / pc.z() + cam.cx, cam.fy * pc.y() / pc.z() + cam.cy);
  }

  for (int f = 0; f < model.num_faces(); ++f) {
    std::array<int, 3> idx = model.faces[f];
    if (z[idx[0]] <= kNearPlane || z[idx[1]] <= kNearPlane || z[idx[2]] <= kNearPlane) continue;
    // corner order kept in `order` so barycentrics map back to face corners
    std::array<int, 3> order{0, 1, 2};
    double area = edge(screen[idx[0]], screen[idx[1]], screen[idx[2]]);
    if (area == 0.0 || !std::isfinite(area)) continue;
    if (area < 0.0) {
      std::swap(order[1], order[2]);
      area = -area;
    }
    const Vec2& p0 = screen[idx[order[0]]];
    const Vec2& p1 = screen[idx[order[1]]];
    const Vec2& p2 = screen[idx[order[2]]];
    const double iz0 = 1.0 / z[idx[order[0]]], iz1 = 1.0 / z[idx[order[1]]], iz2 = 1.0 / z[idx[order[2]]];

    const double minx = std::min({p0.x(), p1.x(), p2.x()}), maxx = std::max({p0.x(), p1.x(), p2.x()});
    const double miny = std::min({p0.y(), p1.y(), p2.y()}), maxy = std::max({p0.y(), p1.y(), p2.y()});
    const int x0 = std::max(0, static_cast<int>(std::ceil(minx - 0.5)));
    const int x1 = std::min(W - 1, static_cast<int>(std::floor(maxx - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(miny - 0.5)));
    const int y1 = std::min(H - 1, static_cast<int>(std::floor(maxy - 0.5)));
    if (x0 > x1 || y0 > y1) continue;

    const bool tl0 = top_left(p1, p2), tl1 = top_left(p2, p0), tl2 = top_left(p0, p1);
    const Rgb part_color = palette.color(model.face_part[f]);
    const auto& uvs = model.corner_uvs[f];

    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const Vec2 p(x + 0.5, y + 0.5);
        const double w0 = edge(p1, p2, p), w1 = edge(p2, p0, p), w2 = edge(p0, p1, p);
        if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
        if ((w0 == 0.0 && !tl0) || (w1 == 0.0 && !tl1) || (w2 == 0.0 && !tl2)) continue;
        const double b0 = w0 / area * iz0, b1 = w1 / area * iz1, b2 = w2 / area * iz2;
        const double inv = b0 + b1 + b2;
        const double depth = 1.0 / inv;
        const size_t pix = static_cast<size_t>(y) * W + x;
        if (!(depth < out.depth[pix])) continue;
        std::array<double, 3> lam{};
        lam[order[0]] = b0 / inv;
        lam[order[1]] = b1 / inv;
        lam[order[2]] = b2 / inv;
        out.depth[pix] = depth;
        out.face[pix] = f;
        out.bary[pix] = lam;
        out.proxy.seg.set(x, y, part_color);
        out.proxy.uv.set(x, y, encode_uv(lam[0] * uvs[0] + lam[1] * uvs[1] + lam[2] * uvs[2]));
      }
    }
  }
  return out;
}

Proxy rasterize(const PosedMesh& mesh, const BodyModel& model, const Camera& cam, const Palette& palette) {
  return std::move(render(mesh, model, cam, palette).proxy);
}

}  // namespace proxyfit
