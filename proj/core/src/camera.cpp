#include "proxyfit/camera.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Geometry>

#include "json_util.hpp"

namespace proxyfit {

using detail::json;

Projection project(const Camera& cam, const Vec3& point) {
  const Vec3 pc = cam.to_camera(point);
  Projection out;
  out.depth = pc.z();
  out.in_front = pc.z() > 0.0;
  if (std::abs(pc.z()) > 1e-12) out.pixel = Vec2(cam.fx * pc.x() / pc.z() + cam.cx, cam.fy * pc.y() / pc.z() + cam.cy);
  return out;
}

Camera crop_camera(const Camera& cam, const PixelRect& bbox, int out_size) {
  constexpr double kSlack = 1e-6;
  if (!(bbox.w > 0.0 && bbox.h > 0.0) || out_size <= 0) throw ValidationError("degenerate crop box");
  if (bbox.x < -kSlack || bbox.y < -kSlack || bbox.x + bbox.w > cam.width + kSlack || bbox.y + bbox.h > cam.height + kSlack)
    throw ValidationError("crop box outside the image");
  Camera out = cam;
  const double sx = out_size / bbox.w;
  const double sy = out_size / bbox.h;
  out.fx = cam.fx * sx;
  out.fy = cam.fy * sy;
  out.cx = (cam.cx - bbox.x) * sx;
  out.cy = (cam.cy - bbox.y) * sy;
  out.width = out_size;
  out.height = out_size;
  return out;
}

PixelRect enlarge_box(const PixelRect& tight, double factor, int width, int height) {
  const double side = factor * std::max(tight.w, tight.h);
  const double cx = tight.x + 0.5 * tight.w;
  const double cy = tight.y + 0.5 * tight.h;
  PixelRect r{cx - 0.5 * side, cy - 0.5 * side, side, side};
  auto fit_axis = [](double& lo, double& len, double limit) {
    if (len >= limit) {
      lo = 0.0;
      len = limit;
      return;
    }
    lo = std::clamp(lo, 0.0, limit - len);
  };
  fit_axis(r.x, r.w, width);
  fit_axis(r.y, r.h, height);
  return r;
}

std::vector<Camera> sample_rig(const RigConfig& cfg) {
  if (cfg.n_views < 1) throw ValidationError("rig needs at least one view");
  std::mt19937_64 rng(cfg.seed ^ 0x5ca1ab1eULL);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> elev(cfg.elevation_min_deg, cfg.elevation_max_deg);
  const double deg = M_PI / 180.0;
  const double az0 = 180.0 * unit(rng) * deg;

  std::vector<Camera> cams;
  for (int v = 0; v < cfg.n_views; ++v) {
    const double az = az0 + 2.0 * M_PI * v / cfg.n_views + cfg.azimuth_jitter_deg * unit(rng) * deg;
    const double el = elev(rng) * deg;
    const double radius = cfg.radius * (1.0 + cfg.radius_jitter * unit(rng));
    const double focal = cfg.focal * (1.0 + cfg.focal_jitter * unit(rng));
    const Vec3 center = cfg.target + radius * Vec3(std::sin(az) * std::cos(el), std::sin(el), std::cos(az) * std::cos(el));
    const Vec3 forward = (cfg.target - center).normalized();
    const Vec3 right = forward.cross(Vec3::UnitY()).normalized();
    const Vec3 down = forward.cross(right);
    Camera c;
    c.R.row(0) = right.transpose();
    c.R.row(1) = down.transpose();
    c.R.row(2) = forward.transpose();
    c.t = -c.R * center;
    c.fx = c.fy = focal;
    c.cx = c.cy = 0.5 * cfg.image_size;
    c.width = c.height = cfg.image_size;
    cams.push_back(c);
  }
  return cams;
}

void validate_camera(const Camera& cam) {
  if (!(cam.fx > 0.0 && cam.fy > 0.0)) throw ValidationError("camera focal lengths must be positive");
  if (cam.width <= 0 || cam.height <= 0) throw ValidationError("camera image size must be positive");
  if (!cam.R.allFinite() || !cam.t.allFinite()) throw ValidationError("non-finite camera extrinsics");
  if ((cam.R * cam.R.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-8 || std::abs(cam.R.determinant() - 1.0) > 1e-8)
    throw ValidationError("camera rotation is not a proper rotation");
}

std::string cameras_to_json(const std::vector<Camera>& cams) {
  json arr = json::array();
  for (const Camera& c : cams) {
    json R = json::array();
    for (int r = 0; r < 3; ++r) R.push_back(detail::vec_to_json(c.R.row(r)));
    arr.push_back({{"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx}, {"cy", c.cy}, {"R", R}, {"t", detail::vec_to_json(c.t)},
                   {"width", c.width}, {"height", c.height}});
  }
  return arr.dump(1);
}

std::vector<Camera> cameras_from_json(const std::string& text) {
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed camera file: ") + e.what());
  }
  auto cams = detail::parse_guard("malformed camera file", [&] {
    if (!arr.is_array()) throw ParseError("camera file must be a JSON array");
    std::vector<Camera> out;
    for (const json& j : arr) {
      Camera c;
      c.fx = j.at("fx").get<double>();
      c.fy = j.at("fy").get<double>();
      c.cx = j.at("cx").get<double>();
      c.cy = j.at("cy").get<double>();
      const json& R = j.at("R");
      if (R.size() != 3) throw ParseError("R must be 3x3");
      for (int r = 0; r < 3; ++r) c.R.row(r) = detail::json_to_fixed<3>(R[r]).transpose();
      c.t = detail::json_to_fixed<3>(j.at("t"));
      c.width = j.at("width").get<int>();
      c.height = j.at("height").get<int>();
      out.push_back(c);
    }
    return out;
  });
  for (const Camera& c : cams) validate_camera(c);
  return cams;
}

void save_cameras(const std::vector<Camera>& cams, const std::string& path) {
  detail::write_text_file(path, cameras_to_json(cams) + "\n");
}

std::vector<Camera> load_cameras(const std::string& path) {
  return cameras_from_json(detail::read_json_file(path).dump());
}

}  // namespace proxyfit
