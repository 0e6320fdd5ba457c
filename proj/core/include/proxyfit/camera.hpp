#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "proxyfit/rotation.hpp"

namespace proxyfit {

// Pinhole camera, world-to-camera extrinsics, +z forward, +y down.
struct Camera {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();
  int width = 256;
  int height = 256;

  Vec3 to_camera(const Vec3& p) const { return R * p + t; }
  Vec3 center() const { return -R.transpose() * t; }

  bool operator==(const Camera& o) const {
    return fx == o.fx && fy == o.fy && cx == o.cx && cy == o.cy && R == o.R && t == o.t && width == o.width &&
           height == o.height;
  }
};

struct Projection {
  Vec2 pixel = Vec2::Zero();
  double depth = 0.0;
  bool in_front = false;  // depth > 0; pixel is meaningless otherwise
};

Projection project(const Camera& cam, const Vec3& point);

// Axis-aligned pixel rectangle [x, x+w) x [y, y+h).
struct PixelRect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  bool operator==(const PixelRect&) const = default;
};

// Camera whose image is `bbox` resampled to out_size x out_size.
// Throws ValidationError for a degenerate or out-of-image box.
Camera crop_camera(const Camera& cam, const PixelRect& bbox, int out_size);

// Square box of side factor * max(w, h) around `tight`, shifted and then
// clipped to stay inside a width x height image.
PixelRect enlarge_box(const PixelRect& tight, double factor, int width, int height);

struct RigConfig {
  int n_views = 4;
  double radius = 3.2;
  std::uint64_t seed = 0;
  Vec3 target = Vec3::Zero();
  double focal = 340.0;
  double focal_jitter = 0.05;        // relative
  double radius_jitter = 0.05;       // relative
  double azimuth_jitter_deg = 8.0;
  double elevation_min_deg = -5.0;
  double elevation_max_deg = 20.0;
  int image_size = 256;
};

// Cameras on a jittered ring around `target`, all looking at it.
std::vector<Camera> sample_rig(const RigConfig& config);

// Throws ValidationError unless R is a proper rotation and fx, fy > 0.
void validate_camera(const Camera& cam);

std::string cameras_to_json(const std::vector<Camera>& cams);
std::vector<Camera> cameras_from_json(const std::string& text);
void save_cameras(const std::vector<Camera>& cams, const std::string& path);
std::vector<Camera> load_cameras(const std::string& path);

}  // namespace proxyfit
