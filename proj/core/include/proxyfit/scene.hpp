#pragma once

#include <cstdint>
#include <string>

#include "proxyfit/camera.hpp"
#include "proxyfit/corruption.hpp"
#include "proxyfit/fitter.hpp"
#include "proxyfit/procedural.hpp"

namespace proxyfit {

// Ranges for drawing ground-truth parameters.
struct ParamSampling {
  double beta_sigma = 0.5;
  double pose_sigma = 0.2;        // radians, per axis-angle component
  double hand_sigma = 0.6;        // per hand PCA coefficient
  double yaw_range_deg = 45.0;    // uniform in [-range, range] about +y
  double tilt_sigma = 0.05;       // radians, about x and z
  double translation_range = 0.2; // uniform per axis
  double scale_min = 0.95;
  double scale_max = 1.05;

  bool operator==(const ParamSampling&) const = default;
};

enum class InitMode { kRest, kGtPerturbed };

struct InitConfig {
  InitMode mode = InitMode::kRest;
  double translation_noise = 0.3;  // length of the offset, gt_perturbed only
  double rotation_noise = 0.2;     // radians about a random axis
  double pose_noise = 0.0;         // per theta component (Gaussian sigma)
};

struct HandCropConfig {
  bool enabled = true;
  double enlarge = 2.2;
  int size = 256;
};

struct CameraPerturbation {
  double rotation_deg = 0.0;
  double translation_rel = 0.0;

  bool active() const { return rotation_deg > 0.0 || translation_rel > 0.0; }
};

// Everything that decides a scene's bytes.
struct SceneConfig {
  std::uint64_t seed = 1;
  HumanoidConfig model;
  std::string model_file;  // overrides `model` when set
  ParamSampling sampling;
  RigConfig rig;           // rig.seed and rig.target are derived per scene
  CorruptionSpec corruption;  // corruption.seed is derived per scene
  int k = 5;
  HandCropConfig hand_crops;
  CameraPerturbation camera_perturbation;
  InitConfig init;
  FitConfig fit;
  CorrespondenceOptions correspondences;
  int uv_grid = 32;
};

// Throws ValidationError for inconsistent settings.
void validate_scene_config(const SceneConfig& config);

std::string scene_config_to_json(const SceneConfig& config);
// Missing keys keep their defaults; unknown keys are rejected.
SceneConfig scene_config_from_json(const std::string& text);
SceneConfig load_scene_config(const std::string& path);
void save_scene_config(const SceneConfig& config, const std::string& path);

}  // namespace proxyfit
