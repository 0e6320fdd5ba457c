#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proxyfit/aggregation.hpp"
#include "proxyfit/metrics.hpp"
#include "proxyfit/raster.hpp"
#include "proxyfit/scene.hpp"

namespace proxyfit {

// A synthesised scene: ground truth plus the K corrupted samples per body view.
struct Scene {
  SceneConfig config;
  BodyModel model;
  Palette palette;
  PoseParams gt_params;
  PosedMesh gt_mesh;
  std::vector<Camera> cameras;            // ground-truth rig
  std::vector<Camera> cameras_perturbed;  // empty unless the config perturbs cameras
  std::vector<Proxy> gt_proxies;          // per body view
  std::vector<std::vector<Proxy>> samples;  // [view][k]
};

BodyModel build_model(const SceneConfig& config);
PoseParams sample_params(const BodyModel& model, const ParamSampling& sampling, std::uint64_t seed);

// `model` may be passed to skip rebuilding the procedural model.
Scene synthesize_scene(const SceneConfig& config, const BodyModel* model = nullptr);

// Simulated second pass: a hand located in a body view, re-rendered from the
// ground truth through the crop camera and corrupted K times.
struct CropView {
  int rig = 0;  // body view the crop came from
  ViewKind kind = ViewKind::kHandLeft;
  PixelRect bbox;
  int size = 256;
  Proxy gt;
  std::vector<Proxy> samples;
};

struct SceneAggregates {
  std::vector<AggregatedProxy> body;  // per body view, all K samples
  std::vector<CropView> crops;
  std::vector<AggregatedProxy> crop_aggs;
};

// Aggregates every body view, then locates hands on the aggregated
// segmentation and builds the crop views (when enabled).
SceneAggregates aggregate_scene(const Scene& scene);

struct FitOptions {
  int k = -1;                     // samples to aggregate; -1 = all
  bool hands = true;              // use hand-crop views
  int views = -1;                 // body views, strided subset; -1 = all
  bool refine_cameras = false;
  bool weighting = true;
  bool perturbed_cameras = true;  // start from cameras_perturbed when present
};

struct FitInputs {
  std::vector<FitView> views;
  std::vector<AggregatedProxy> aggs;
  std::vector<ViewKind> kinds;
  std::vector<int> body_views;  // scene view index of each rig camera
};

// Strided subset: view i * n / count for i < count.
std::vector<int> strided_views(int n, int count);

FitInputs prepare_fit_inputs(const Scene& scene, const SceneAggregates& aggs, const FitOptions& options);

PoseParams initial_params(const Scene& scene, const FitInputs& inputs);

struct FitOutcome {
  FitReport report;
  PosedMesh mesh;
  MetricReport body;
  MetricReport hands;
  std::vector<Camera> rig_cameras;  // after refinement (== inputs when not refined)
  int correspondences = 0;
};

FitOutcome fit_scene(const Scene& scene, const SceneAggregates& aggs, const FitOptions& options);

// ---- on-disk layout (see docs/formats.md) ----

void write_scene(const Scene& scene, const std::string& dir);
Scene load_scene(const std::string& dir);

void write_aggregates(const Scene& scene, const SceneAggregates& aggs, const std::string& dir);
SceneAggregates load_aggregates(const Scene& scene, const std::string& dir);

void write_fit_outputs(const Scene& scene, const FitOutcome& outcome, const FitOptions& options, const std::string& out_dir);

std::string fit_report_to_json(const FitReport& report, const FitOptions& options, int correspondences);
std::string metrics_to_json(const MetricReport& body, const MetricReport& hands);

// manifest.json: SHA-256 of every file under `dir` except the manifest and
// timing files, sorted by relative path.
void write_manifest(const std::string& dir);

// ---- ablation sweeps ----

enum class SweepAxis { kViews, kK, kWeighting };
SweepAxis parse_sweep_axis(const std::string& name);
std::string to_string(SweepAxis axis);

struct SweepRow {
  std::uint64_t seed = 0;
  int value = 0;
  MetricReport body;
  MetricReport hands;
  double seconds = 0.0;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::kViews;
  std::vector<int> values;
  std::vector<SweepRow> rows;

  // Median of `metric` over seeds for `value`.
  double median(int value, double MetricReport::* metric, bool hands = false) const;
};

// Scenes seed, seed + 1, ... seed + count - 1, each fitted once per value.
// Weighting values are 1 (on) and 0 (off).
SweepResult run_sweep(const SceneConfig& config, SweepAxis axis, const std::vector<int>& values, int count,
                      const BodyModel* model = nullptr);

void write_sweep(const SweepResult& result, const std::string& dir);

}  // namespace proxyfit
