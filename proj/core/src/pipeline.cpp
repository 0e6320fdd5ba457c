#include "proxyfit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "json_util.hpp"
#include "proxyfit/error.hpp"
#include "proxyfit/hashing.hpp"
#include "proxyfit/model_io.hpp"
#include "proxyfit/seeding.hpp"
#include "proxyfit/svg_plot.hpp"
#include "proxyfit/uv_index.hpp"

namespace proxyfit {

namespace fs = std::filesystem;
using detail::json;

namespace {

enum StreamKey : std::uint64_t { kParamsStream = 1, kRigStream, kPerturbStream, kCorruptStream, kInitStream };

std::string two(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d", i);
  return buf;
}

std::string view_stem(int v) { return "view" + two(v); }
std::string crop_stem(const CropView& c) {
  return "crop" + two(c.rig) + (c.kind == ViewKind::kHandLeft ? "_left" : "_right");
}
std::string sample_dir(const std::string& dir, int k) { return dir + "/samples/k" + two(k); }

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    const Vec3 v(n(rng), n(rng), n(rng));
    if (v.norm() > 1e-9) return v.normalized();
  }
}

CorruptionSpec scene_corruption(const SceneConfig& c) {
  CorruptionSpec spec = c.corruption;
  spec.seed = stream_seed(c.seed, {kCorruptStream});
  return spec;
}

int crop_stream(int rig, ViewKind kind) { return 1000 + 2 * rig + (kind == ViewKind::kHandLeft ? 0 : 1); }

void write_proxy(const Proxy& p, const std::string& base) {
  write_png(base + "_seg.png", p.seg);
  write_png(base + "_uv.png", p.uv);
}

Proxy read_proxy(const std::string& base) { return {read_png(base + "_seg.png"), read_png(base + "_uv.png")}; }

}  // namespace

BodyModel build_model(const SceneConfig& config) {
  if (!config.model_file.empty()) return load_model(config.model_file);
  return make_procedural_humanoid(config.model);
}

PoseParams sample_params(const BodyModel& model, const ParamSampling& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PoseParams p = PoseParams::zeros(model);
  for (Eigen::Index i = 0; i < p.beta.size(); ++i) p.beta[i] = s.beta_sigma * n(rng);
  for (Eigen::Index i = 0; i < p.theta.size(); ++i) p.theta[i] = s.pose_sigma * n(rng);
  for (Eigen::Index i = 0; i < p.hand_left.size(); ++i) p.hand_left[i] = s.hand_sigma * n(rng);
  for (Eigen::Index i = 0; i < p.hand_right.size(); ++i) p.hand_right[i] = s.hand_sigma * n(rng);
  const double yaw = s.yaw_range_deg * M_PI / 180.0 * u(rng);
  const double tx = s.tilt_sigma * n(rng);
  const double tz = s.tilt_sigma * n(rng);
  const Mat3 R = rodrigues(Vec3(0, 0, tz)) * rodrigues(Vec3(tx, 0, 0)) * rodrigues(Vec3(0, yaw, 0));
  p.global_rot = rotation_log(R);
  for (int k = 0; k < 3; ++k) p.translation[k] = s.translation_range * u(rng);
  p.scale = s.scale_min + (s.scale_max - s.scale_min) * 0.5 * (u(rng) + 1.0);
  return p;
}

Scene synthesize_scene(const SceneConfig& config, const BodyModel* model) {
  validate_scene_config(config);
  Scene sc;
  sc.config = config;
  sc.model = model ? *model : build_model(config);
  sc.palette = make_palette(sc.model);
  sc.gt_params = sample_params(sc.model, config.sampling, stream_seed(config.seed, {kParamsStream}));
  sc.gt_mesh = forward(sc.model, sc.gt_params);

  RigConfig rig = config.rig;
  rig.seed = stream_seed(config.seed, {kRigStream});
  rig.target = sc.gt_mesh.vertices.colwise().mean().transpose();
  sc.cameras = sample_rig(rig);

  if (config.camera_perturbation.active()) {
    std::mt19937_64 rng(stream_seed(config.seed, {kPerturbStream}));
    for (const Camera& c : sc.cameras) {
      Camera p = c;
      p.R = rodrigues(random_unit(rng) * config.camera_perturbation.rotation_deg * M_PI / 180.0) * c.R;
      p.t = c.t + config.camera_perturbation.translation_rel * c.t.norm() * random_unit(rng);
      sc.cameras_perturbed.push_back(p);
    }
  }

  const CorruptionSpec spec = scene_corruption(config);
  for (int v = 0; v < static_cast<int>(sc.cameras.size()); ++v) {
    sc.gt_proxies.push_back(rasterize(sc.gt_mesh, sc.model, sc.cameras[v], sc.palette));
    std::vector<Proxy> samples;
    for (int k = 0; k < config.k; ++k)
      samples.push_back(corrupt(sc.gt_proxies.back(), sc.palette, spec, v, k, PaletteSubset::kAll));
    sc.samples.push_back(std::move(samples));
  }
  return sc;
}

SceneAggregates aggregate_scene(const Scene& scene) {
  SceneAggregates out;
  for (const auto& samples : scene.samples) out.body.push_back(aggregate(samples, scene.palette, PaletteSubset::kAll));
  const HandCropConfig& hc = scene.config.hand_crops;
  if (!hc.enabled) return out;
  const CorruptionSpec spec = scene_corruption(scene.config);
  for (int v = 0; v < static_cast<int>(out.body.size()); ++v) {
    const Proxy located{seg_image(out.body[v], scene.palette), out.body[v].uv_hat};
    const HandBoxes boxes = hand_bboxes(located, scene.palette, hc.enlarge);
    for (ViewKind kind : {ViewKind::kHandLeft, ViewKind::kHandRight}) {
      const auto& box = kind == ViewKind::kHandLeft ? boxes.left : boxes.right;
      if (!box) continue;
      CropView c;
      c.rig = v;
      c.kind = kind;
      c.bbox = *box;
      c.size = hc.size;
      const Camera cam = crop_camera(scene.cameras[v], c.bbox, c.size);
      c.gt = rasterize(scene.gt_mesh, scene.model, cam, scene.palette);
      for (int k = 0; k < scene.config.k; ++k)
        c.samples.push_back(corrupt(c.gt, scene.palette, spec, crop_stream(v, kind), k, PaletteSubset::kHand));
      out.crop_aggs.push_back(aggregate(c.samples, scene.palette, PaletteSubset::kHand));
      out.crops.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<int> strided_views(int n, int count) {
  if (n < 1) throw ValidationError("scene has no views");
  if (count < 1 || count > n) throw ValidationError("--views must be between 1 and " + std::to_string(n));
  std::vector<int> out;
  for (int i = 0; i < count; ++i) out.push_back(i * n / count);
  return out;
}

FitInputs prepare_fit_inputs(const Scene& scene, const SceneAggregates& aggs, const FitOptions& options) {
  const int K = scene.config.k;
  const int k = options.k < 0 ? K : options.k;
  if (k < 1 || k > K) throw ValidationError("--k must be between 1 and the scene's K (" + std::to_string(K) + ")");
  const bool reaggregate = k != K;
  auto first_k = [&](const std::vector<Proxy>& s) { return std::span<const Proxy>(s.data(), static_cast<size_t>(k)); };
  const std::vector<Camera>& rig_src =
      options.perturbed_cameras && !scene.cameras_perturbed.empty() ? scene.cameras_perturbed : scene.cameras;
  const int n = static_cast<int>(scene.cameras.size());

  FitInputs in;
  in.body_views = strided_views(n, options.views < 0 ? n : options.views);
  for (int r = 0; r < static_cast<int>(in.body_views.size()); ++r) {
    const int v = in.body_views[r];
    in.views.push_back({rig_src[v], r, ViewKind::kBody});
    in.aggs.push_back(reaggregate ? aggregate(first_k(scene.samples[v]), scene.palette, PaletteSubset::kAll) : aggs.body[v]);
    in.kinds.push_back(ViewKind::kBody);
  }
  if (options.hands) {
    for (size_t i = 0; i < aggs.crops.size(); ++i) {
      const CropView& c = aggs.crops[i];
      const auto it = std::find(in.body_views.begin(), in.body_views.end(), c.rig);
      if (it == in.body_views.end()) continue;
      const int r = static_cast<int>(it - in.body_views.begin());
      in.views.push_back({crop_camera(rig_src[c.rig], c.bbox, c.size), r, c.kind});
      in.aggs.push_back(reaggregate ? aggregate(first_k(c.samples), scene.palette, PaletteSubset::kHand) : aggs.crop_aggs[i]);
      in.kinds.push_back(c.kind);
    }
  }
  return in;
}

PoseParams initial_params(const Scene& scene, const FitInputs& inputs) {
  const InitConfig& init = scene.config.init;
  if (init.mode == InitMode::kGtPerturbed) {
    std::mt19937_64 rng(stream_seed(scene.config.seed, {kInitStream}));
    PoseParams p = scene.gt_params;
    const Mat3 noise = rodrigues(random_unit(rng) * init.rotation_noise);
    p.global_rot = rotation_log(noise * rodrigues(p.global_rot));
    p.translation += init.translation_noise * random_unit(rng);
    std::normal_distribution<double> n(0.0, 1.0);
    for (Eigen::Index i = 0; i < p.theta.size(); ++i) p.theta[i] += init.pose_noise * n(rng);
    return p;
  }
  PoseParams p = PoseParams::zeros(scene.model);
  std::vector<Camera> cams;
  std::vector<Vec2> centroids;
  for (size_t i = 0; i < inputs.views.size(); ++i) {
    if (inputs.kinds[i] != ViewKind::kBody) continue;
    const AggregatedProxy& a = inputs.aggs[i];
    Vec2 sum = Vec2::Zero();
    long count = 0;
    for (int y = 0; y < a.height; ++y)
      for (int x = 0; x < a.width; ++x)
        if (a.label(x, y) != kBackground) {
          sum += Vec2(x + 0.5, y + 0.5);
          ++count;
        }
    if (count == 0) continue;
    cams.push_back(inputs.views[i].camera);
    centroids.push_back(sum / static_cast<double>(count));
  }
  const Vec3 template_centre = scene.model.template_vertices.colwise().mean().transpose();
  if (!cams.empty()) p.translation = triangulate_rays(cams, centroids) - template_centre;
  return p;
}

FitOutcome fit_scene(const Scene& scene, const SceneAggregates& aggs, const FitOptions& options) {
  const FitInputs in = prepare_fit_inputs(scene, aggs, options);
  const UvIndex index(scene.model, scene.config.uv_grid);
  CorrespondenceOptions co = scene.config.correspondences;
  co.use_weights = co.use_weights && options.weighting;
  const std::vector<Correspondence> corrs = extract_correspondences(in.aggs, in.kinds, index, scene.model, co);
  FitConfig fc = scene.config.fit;
  fc.optimize_cameras = fc.optimize_cameras || options.refine_cameras;

  FitOutcome out;
  out.correspondences = static_cast<int>(corrs.size());
  out.report = fit(scene.model, in.views, corrs, initial_params(scene, in), fc);
  out.mesh = forward(scene.model, out.report.params);
  out.body = joint_and_vertex_errors(out.mesh, scene.gt_mesh);
  out.hands = joint_and_vertex_errors(out.mesh, scene.gt_mesh, hand_subset(scene.model));
  for (size_t r = 0; r < in.body_views.size(); ++r) {
    const Camera& c = in.views[r].camera;
    out.rig_cameras.push_back(out.report.camera_deltas.empty() ? c : apply_delta(c, out.report.camera_deltas[r]));
  }
  return out;
}

// ---- on-disk layout ----

void write_scene(const Scene& scene, const std::string& dir) {
  fs::create_directories(dir + "/proxies/gt");
  save_scene_config(scene.config, dir + "/config.json");
  save_model(scene.model, dir + "/model.json");
  save_palette(scene.palette, dir + "/palette.json");
  save_cameras(scene.cameras, dir + "/cameras.json");
  if (!scene.cameras_perturbed.empty()) save_cameras(scene.cameras_perturbed, dir + "/cameras_perturbed.json");
  save_params(scene.gt_params, dir + "/gt_params.json");
  for (int v = 0; v < static_cast<int>(scene.gt_proxies.size()); ++v) {
    write_proxy(scene.gt_proxies[v], dir + "/proxies/gt/" + view_stem(v));
    for (int k = 0; k < static_cast<int>(scene.samples[v].size()); ++k) {
      fs::create_directories(sample_dir(dir, k));
      write_proxy(scene.samples[v][k], sample_dir(dir, k) + "/" + view_stem(v));
    }
  }
  write_manifest(dir);
}

Scene load_scene(const std::string& dir) {
  Scene sc;
  sc.config = load_scene_config(dir + "/config.json");
  sc.model = load_model(dir + "/model.json");
  sc.palette = load_palette(dir + "/palette.json");
  validate_palette(sc.palette);
  if (sc.palette.size() != sc.model.num_parts()) throw ValidationError("palette size differs from the model's part count");
  sc.cameras = load_cameras(dir + "/cameras.json");
  for (const Camera& c : sc.cameras) validate_camera(c);
  if (fs::exists(dir + "/cameras_perturbed.json")) sc.cameras_perturbed = load_cameras(dir + "/cameras_perturbed.json");
  sc.gt_params = load_params(dir + "/gt_params.json");
  check_params(sc.model, sc.gt_params);
  sc.gt_mesh = forward(sc.model, sc.gt_params);
  for (int v = 0; v < static_cast<int>(sc.cameras.size()); ++v) {
    sc.gt_proxies.push_back(read_proxy(dir + "/proxies/gt/" + view_stem(v)));
    std::vector<Proxy> samples;
    for (int k = 0; k < sc.config.k; ++k) samples.push_back(read_proxy(sample_dir(dir, k) + "/" + view_stem(v)));
    sc.samples.push_back(std::move(samples));
  }
  return sc;
}

void write_aggregates(const Scene& scene, const SceneAggregates& aggs, const std::string& dir) {
  fs::create_directories(dir + "/aggregated");
  json views = json::array();
  for (int v = 0; v < static_cast<int>(aggs.body.size()); ++v) {
    write_aggregated(aggs.body[v], scene.palette, dir + "/aggregated", view_stem(v));
    views.push_back({{"stem", view_stem(v)}, {"kind", "body"}, {"rig", v}});
  }
  for (size_t i = 0; i < aggs.crops.size(); ++i) {
    const CropView& c = aggs.crops[i];
    const std::string stem = crop_stem(c);
    write_proxy(c.gt, dir + "/proxies/gt/" + stem);
    for (int k = 0; k < static_cast<int>(c.samples.size()); ++k) {
      fs::create_directories(sample_dir(dir, k));
      write_proxy(c.samples[k], sample_dir(dir, k) + "/" + stem);
    }
    write_aggregated(aggs.crop_aggs[i], scene.palette, dir + "/aggregated", stem);
    views.push_back({{"stem", stem},
                     {"kind", std::string(to_string(c.kind))},
                     {"rig", c.rig},
                     {"bbox", {c.bbox.x, c.bbox.y, c.bbox.w, c.bbox.h}},
                     {"size", c.size}});
  }
  json j = {{"format", "proxyfit-views"}, {"k", scene.config.k}, {"views", views}};
  detail::write_json_file(dir + "/views.json", j);
  write_manifest(dir);
}

SceneAggregates load_aggregates(const Scene& scene, const std::string& dir) {
  const json j = detail::read_json_file(dir + "/views.json");
  return detail::parse_guard("malformed views.json", [&] {
    if (j.at("format").get<std::string>() != "proxyfit-views") throw ParseError("views.json has the wrong format tag");
    if (j.at("k").get<int>() != scene.config.k) throw ValidationError("views.json was aggregated with a different K");
    SceneAggregates out;
    for (const json& v : j.at("views")) {
      const std::string stem = v.at("stem").get<std::string>();
      const ViewKind kind = parse_view_kind(v.at("kind").get<std::string>());
      if (kind == ViewKind::kBody) {
        out.body.push_back(read_aggregated(scene.palette, dir + "/aggregated", stem, PaletteSubset::kAll));
        continue;
      }
      CropView c;
      c.rig = v.at("rig").get<int>();
      if (c.rig < 0 || c.rig >= static_cast<int>(scene.cameras.size())) throw ValidationError("crop view references a missing camera");
      c.kind = kind;
      const auto box = v.at("bbox").get<std::vector<double>>();
      if (box.size() != 4) throw ParseError("bbox needs 4 numbers");
      c.bbox = {box[0], box[1], box[2], box[3]};
      c.size = v.at("size").get<int>();
      c.gt = read_proxy(dir + "/proxies/gt/" + stem);
      for (int k = 0; k < scene.config.k; ++k) c.samples.push_back(read_proxy(sample_dir(dir, k) + "/" + stem));
      out.crop_aggs.push_back(read_aggregated(scene.palette, dir + "/aggregated", stem, PaletteSubset::kHand));
      out.crops.push_back(std::move(c));
    }
    if (out.body.size() != scene.cameras.size()) throw ValidationError("views.json body views differ from cameras.json");
    return out;
  });
}

std::string fit_report_to_json(const FitReport& r, const FitOptions& o, int correspondences) {
  json j;
  j["format"] = "proxyfit-fit-report";
  j["options"] = {{"k", o.k},
                  {"hands", o.hands},
                  {"views", o.views},
                  {"refine_cameras", o.refine_cameras},
                  {"weighting", o.weighting},
                  {"perturbed_cameras", o.perturbed_cameras}};
  j["correspondences"] = correspondences;
  j["final_loss"] = r.final_loss;
  j["aborted"] = r.aborted;
  j["warnings"] = r.warnings;
  json stages = json::array();
  for (const StageReport& s : r.stages) {
    stages.push_back({{"name", s.name},
                      {"iterations", s.iterations},
                      {"evaluations", s.evaluations},
                      {"correspondences", s.correspondences},
                      {"stop_reason", s.stop_reason},
                      {"trajectory", s.trajectory}});
  }
  j["stages"] = stages;
  json res = json::array();
  for (const ViewResidual& v : r.residuals) {
    res.push_back({{"view", v.view}, {"count", v.count}, {"mean_px", v.mean}, {"median_px", v.median},
                   {"weighted_sq", v.weighted_sq}});
  }
  j["residuals"] = res;
  json deltas = json::array();
  for (const CameraDelta& d : r.camera_deltas)
    deltas.push_back({{"omega", detail::vec_to_json(d.omega)}, {"t", detail::vec_to_json(d.t)}});
  j["camera_deltas"] = deltas;
  return j.dump(1);
}

std::string metrics_to_json(const MetricReport& body, const MetricReport& hands) {
  auto block = [](const MetricReport& m) {
    return json{{"mpjpe", m.mpjpe}, {"pa_mpjpe", m.pa_mpjpe}, {"mpvpe", m.mpvpe}, {"pa_mpvpe", m.pa_mpvpe}};
  };
  json j = {{"format", "proxyfit-metrics"},
            {"units", "model"},
            {"root_joint", 0},
            {"procrustes", "estimated on joints, applied to vertices"},
            {"body", block(body)},
            {"hands", block(hands)}};
  return j.dump(1);
}

void write_fit_outputs(const Scene& scene, const FitOutcome& outcome, const FitOptions& options, const std::string& out_dir) {
  fs::create_directories(out_dir);
  detail::write_text_file(out_dir + "/fit_report.json",
                          fit_report_to_json(outcome.report, options, outcome.correspondences) + "\n");
  save_params(outcome.report.params, out_dir + "/fitted_params.json");
  write_obj(out_dir + "/fitted.obj", outcome.mesh, scene.model);
  if (!outcome.report.camera_deltas.empty()) save_cameras(outcome.rig_cameras, out_dir + "/cameras_refined.json");
  detail::write_json_file(out_dir + "/timing.json", {{"wall_seconds", outcome.report.wall_seconds}});
}

void write_manifest(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), dir).generic_string();
    const std::string name = e.path().filename().string();
    if (rel == "manifest.json" || name == "timing.json") continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  json list = json::array();
  for (const std::string& rel : files) {
    const std::string path = dir + "/" + rel;
    list.push_back({{"path", rel}, {"bytes", fs::file_size(path)}, {"sha256", sha256_file(path)}});
  }
  json j = {{"format", "proxyfit-manifest"},
            {"hand_crops", "simulated: ground truth re-rendered through crop cameras, then corrupted"},
            {"files", list}};
  detail::write_json_file(dir + "/manifest.json", j);
}

// ---- sweeps ----

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "views") return SweepAxis::kViews;
  if (name == "K" || name == "k") return SweepAxis::kK;
  if (name == "weighting") return SweepAxis::kWeighting;
  throw ValidationError("unknown sweep axis '" + name + "' (views|K|weighting)");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kViews: return "views";
    case SweepAxis::kK: return "K";
    case SweepAxis::kWeighting: return "weighting";
  }
  return "views";
}

double SweepResult::median(int value, double MetricReport::* metric, bool hands) const {
  std::vector<double> v;
  for (const SweepRow& r : rows)
    if (r.value == value) v.push_back((hands ? r.hands : r.body).*metric);
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

SweepResult run_sweep(const SceneConfig& config, SweepAxis axis, const std::vector<int>& values, int count,
                      const BodyModel* model) {
  if (values.empty()) throw ValidationError("sweep needs at least one value");
  if (count < 1) throw ValidationError("sweep needs at least one scene");
  SceneConfig base = config;
  const int vmax = *std::max_element(values.begin(), values.end());
  if (axis == SweepAxis::kViews) base.rig.n_views = vmax;
  if (axis == SweepAxis::kK) base.k = vmax;
  for (int v : values) {
    if (axis == SweepAxis::kWeighting && v != 0 && v != 1) throw ValidationError("weighting values must be 0 or 1");
    if (axis != SweepAxis::kWeighting && v < 1) throw ValidationError("sweep values must be >= 1");
  }
  const BodyModel shared = model ? *model : build_model(base);

  SweepResult res;
  res.axis = axis;
  res.values = values;
  for (int s = 0; s < count; ++s) {
    SceneConfig c = base;
    c.seed = config.seed + static_cast<std::uint64_t>(s);
    const Scene scene = synthesize_scene(c, &shared);
    const SceneAggregates aggs = aggregate_scene(scene);
    for (int v : values) {
      FitOptions o;
      if (axis == SweepAxis::kViews) o.views = v;
      if (axis == SweepAxis::kK) o.k = v;
      if (axis == SweepAxis::kWeighting) o.weighting = v != 0;
      const FitOutcome out = fit_scene(scene, aggs, o);
      res.rows.push_back({c.seed, v, out.body, out.hands, out.report.wall_seconds});
    }
  }
  return res;
}

void write_sweep(const SweepResult& r, const std::string& dir) {
  fs::create_directories(dir);
  const std::string axis = to_string(r.axis);
  char buf[256];
  std::string csv = "seed," + axis + ",mpjpe,pa_mpjpe,mpvpe,pa_mpvpe,hand_mpjpe,hand_pa_mpjpe,seconds\n";
  for (const SweepRow& row : r.rows) {
    std::snprintf(buf, sizeof(buf), "%llu,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.3f\n",
                  static_cast<unsigned long long>(row.seed), row.value, row.body.mpjpe, row.body.pa_mpjpe, row.body.mpvpe,
                  row.body.pa_mpvpe, row.hands.mpjpe, row.hands.pa_mpjpe, row.seconds);
    csv += buf;
  }
  detail::write_text_file(dir + "/sweep.csv", csv);

  std::string md = "| " + axis + " | median MPJPE | median PA-MPJPE | median PA-MPVPE | median hand MPJPE |\n";
  md += "|---|---|---|---|---|\n";
  std::vector<std::string> ticks;
  std::vector<double> pa, hand;
  for (int v : r.values) {
    std::snprintf(buf, sizeof(buf), "| %d | %.6f | %.6f | %.6f | %.6f |\n", v, r.median(v, &MetricReport::mpjpe),
                  r.median(v, &MetricReport::pa_mpjpe), r.median(v, &MetricReport::pa_mpvpe),
                  r.median(v, &MetricReport::mpjpe, true));
    md += buf;
    ticks.push_back(r.axis == SweepAxis::kWeighting ? (v ? "weighted" : "unweighted") : std::to_string(v));
    pa.push_back(r.median(v, &MetricReport::pa_mpjpe));
    hand.push_back(r.median(v, &MetricReport::mpjpe, true));
  }
  detail::write_text_file(dir + "/sweep.md", md);
  detail::write_text_file(dir + "/sweep.svg", line_plot_svg("Median error vs " + axis, axis, "model units", ticks,
                                                            {{"PA-MPJPE", pa}, {"hand MPJPE", hand}}));
}

}  // namespace proxyfit
