#include "proxyfit/scene.hpp"

#include <set>

#include "json_util.hpp"
#include "proxyfit/error.hpp"

namespace proxyfit {

using detail::json;

namespace {

// Reads optional keys of one object and rejects the ones nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ParseError(where_ + ": expected an object");
  }
  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ParseError(where_ + "." + key + ": " + e.what());
    }
  }
  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ParseError(where_ + ": unknown key '" + key + "'");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::string init_mode_name(InitMode m) { return m == InitMode::kRest ? "rest" : "gt_perturbed"; }

InitMode parse_init_mode(const std::string& s) {
  if (s == "rest") return InitMode::kRest;
  if (s == "gt_perturbed") return InitMode::kGtPerturbed;
  throw ParseError("unknown init mode '" + s + "'");
}

json stage_to_json(const StageSpec& s) {
  json blocks = json::array();
  for (Block b : s.blocks) blocks.push_back(std::string(to_string(b)));
  return {{"name", s.name},
          {"blocks", blocks},
          {"data", std::string(to_string(s.data))},
          {"max_iterations", s.max_iterations},
          {"rel_decrease", s.rel_decrease}};
}

StageSpec stage_from_json(const json& j) {
  StageSpec s;
  Reader r(j, "fit.stages[]");
  std::vector<std::string> blocks;
  std::string data = "body";
  r.get("name", s.name);
  r.get("blocks", blocks);
  r.get("data", data);
  r.get("max_iterations", s.max_iterations);
  r.get("rel_decrease", s.rel_decrease);
  r.finish();
  for (const auto& b : blocks) s.blocks.push_back(parse_block(b));
  s.data = parse_stage_data(data);
  return s;
}

}  // namespace

void validate_scene_config(const SceneConfig& c) {
  if (c.k < 1) throw ValidationError("k must be >= 1");
  if (c.rig.n_views < 1) throw ValidationError("rig.n_views must be >= 1");
  if (!(c.rig.radius > 0.0) || !(c.rig.focal > 0.0)) throw ValidationError("rig radius and focal must be > 0");
  if (c.rig.image_size < 8) throw ValidationError("rig.image_size must be >= 8");
  if (c.sampling.scale_min <= 0.0 || c.sampling.scale_max < c.sampling.scale_min)
    throw ValidationError("sampling scale range is invalid");
  if (c.sampling.beta_sigma < 0 || c.sampling.pose_sigma < 0 || c.sampling.hand_sigma < 0 || c.sampling.tilt_sigma < 0 ||
      c.sampling.translation_range < 0 || c.sampling.yaw_range_deg < 0)
    throw ValidationError("sampling spreads must be >= 0");
  validate_corruption(c.corruption);
  if (c.hand_crops.enlarge < 1.0 || c.hand_crops.size < 8) throw ValidationError("hand crop enlarge >= 1 and size >= 8 required");
  if (c.camera_perturbation.rotation_deg < 0 || c.camera_perturbation.translation_rel < 0)
    throw ValidationError("camera perturbation must be >= 0");
  if (c.init.translation_noise < 0 || c.init.rotation_noise < 0 || c.init.pose_noise < 0)
    throw ValidationError("init noise must be >= 0");
  if (c.correspondences.w_min < 0 || c.correspondences.w_min > 1) throw ValidationError("w_min must be in [0,1]");
  if (c.uv_grid < 1) throw ValidationError("uv_grid must be >= 1");
  validate_fit_config(c.fit);
}

std::string scene_config_to_json(const SceneConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["model"] = {{"vertex_budget", c.model.vertex_budget},   {"finger_segments", c.model.finger_segments},
                {"hand_components", c.model.hand_components}, {"shape_components", c.model.shape_components},
                {"body_sides", c.model.body_sides},         {"finger_sides", c.model.finger_sides},
                {"seed", c.model.seed}};
  j["model_file"] = c.model_file;
  const ParamSampling& s = c.sampling;
  j["sampling"] = {{"beta_sigma", s.beta_sigma},     {"pose_sigma", s.pose_sigma},
                   {"hand_sigma", s.hand_sigma},     {"yaw_range_deg", s.yaw_range_deg},
                   {"tilt_sigma", s.tilt_sigma},     {"translation_range", s.translation_range},
                   {"scale_min", s.scale_min},       {"scale_max", s.scale_max}};
  const RigConfig& r = c.rig;
  j["rig"] = {{"n_views", r.n_views},
              {"radius", r.radius},
              {"focal", r.focal},
              {"focal_jitter", r.focal_jitter},
              {"radius_jitter", r.radius_jitter},
              {"azimuth_jitter_deg", r.azimuth_jitter_deg},
              {"elevation_min_deg", r.elevation_min_deg},
              {"elevation_max_deg", r.elevation_max_deg},
              {"image_size", r.image_size}};
  const CorruptionSpec& cs = c.corruption;
  j["corruption"] = {{"uv_sigma", cs.uv_sigma},
                     {"label_flip_prob", cs.label_flip_prob},
                     {"region_flip_prob", cs.region_flip_prob},
                     {"dropout_prob", cs.dropout_prob}};
  j["k"] = c.k;
  j["hand_crops"] = {{"enabled", c.hand_crops.enabled}, {"enlarge", c.hand_crops.enlarge}, {"size", c.hand_crops.size}};
  j["camera_perturbation"] = {{"rotation_deg", c.camera_perturbation.rotation_deg},
                              {"translation_rel", c.camera_perturbation.translation_rel}};
  j["init"] = {{"mode", init_mode_name(c.init.mode)},
               {"translation_noise", c.init.translation_noise},
               {"rotation_noise", c.init.rotation_noise},
               {"pose_noise", c.init.pose_noise}};
  json stages = json::array();
  for (const StageSpec& st : c.fit.stages) stages.push_back(stage_to_json(st));
  const FitConfig& f = c.fit;
  j["fit"] = {{"stages", stages},
              {"max_iterations", f.max_iterations},
              {"rel_decrease", f.rel_decrease},
              {"step_length", f.step_length},
              {"memory", f.memory},
              {"precondition", f.precondition},
              {"huber_scale", f.loss.huber_scale},
              {"hinge_kappa", f.loss.hinge_kappa},
              {"hinge_eps", f.loss.hinge_eps},
              {"pose_prior", f.loss.pose_prior},
              {"optimize_cameras", f.optimize_cameras},
              {"camera_stage_iterations", f.camera_stage_iterations}};
  j["correspondences"] = {{"w_min", c.correspondences.w_min},
                          {"use_weights", c.correspondences.use_weights},
                          {"uv_tolerance", c.correspondences.uv_tolerance}};
  j["uv_grid"] = c.uv_grid;
  return j.dump(1);
}

SceneConfig scene_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed scene config: ") + e.what());
  }
  SceneConfig c;
  Reader top(j, "config");
  top.get("seed", c.seed);
  top.get("model_file", c.model_file);
  top.get("k", c.k);
  top.get("uv_grid", c.uv_grid);
  if (const json* m = top.child("model")) {
    Reader r(*m, "model");
    r.get("vertex_budget", c.model.vertex_budget);
    r.get("finger_segments", c.model.finger_segments);
    r.get("hand_components", c.model.hand_components);
    r.get("shape_components", c.model.shape_components);
    r.get("body_sides", c.model.body_sides);
    r.get("finger_sides", c.model.finger_sides);
    r.get("seed", c.model.seed);
    r.finish();
  }
  if (const json* m = top.child("sampling")) {
    Reader r(*m, "sampling");
    r.get("beta_sigma", c.sampling.beta_sigma);
    r.get("pose_sigma", c.sampling.pose_sigma);
    r.get("hand_sigma", c.sampling.hand_sigma);
    r.get("yaw_range_deg", c.sampling.yaw_range_deg);
    r.get("tilt_sigma", c.sampling.tilt_sigma);
    r.get("translation_range", c.sampling.translation_range);
    r.get("scale_min", c.sampling.scale_min);
    r.get("scale_max", c.sampling.scale_max);
    r.finish();
  }
  if (const json* m = top.child("rig")) {
    Reader r(*m, "rig");
    r.get("n_views", c.rig.n_views);
    r.get("radius", c.rig.radius);
    r.get("focal", c.rig.focal);
    r.get("focal_jitter", c.rig.focal_jitter);
    r.get("radius_jitter", c.rig.radius_jitter);
    r.get("azimuth_jitter_deg", c.rig.azimuth_jitter_deg);
    r.get("elevation_min_deg", c.rig.elevation_min_deg);
    r.get("elevation_max_deg", c.rig.elevation_max_deg);
    r.get("image_size", c.rig.image_size);
    r.finish();
  }
  if (const json* m = top.child("corruption")) {
    Reader r(*m, "corruption");
    r.get("uv_sigma", c.corruption.uv_sigma);
    r.get("label_flip_prob", c.corruption.label_flip_prob);
    r.get("region_flip_prob", c.corruption.region_flip_prob);
    r.get("dropout_prob", c.corruption.dropout_prob);
    r.finish();
  }
  if (const json* m = top.child("hand_crops")) {
    Reader r(*m, "hand_crops");
    r.get("enabled", c.hand_crops.enabled);
    r.get("enlarge", c.hand_crops.enlarge);
    r.get("size", c.hand_crops.size);
    r.finish();
  }
  if (const json* m = top.child("camera_perturbation")) {
    Reader r(*m, "camera_perturbation");
    r.get("rotation_deg", c.camera_perturbation.rotation_deg);
    r.get("translation_rel", c.camera_perturbation.translation_rel);
    r.finish();
  }
  if (const json* m = top.child("init")) {
    Reader r(*m, "init");
    std::string mode = init_mode_name(c.init.mode);
    r.get("mode", mode);
    c.init.mode = parse_init_mode(mode);
    r.get("translation_noise", c.init.translation_noise);
    r.get("rotation_noise", c.init.rotation_noise);
    r.get("pose_noise", c.init.pose_noise);
    r.finish();
  }
  if (const json* m = top.child("fit")) {
    Reader r(*m, "fit");
    if (const json* st = r.child("stages")) {
      if (!st->is_array()) throw ParseError("fit.stages must be an array");
      c.fit.stages.clear();
      for (const json& s : *st) c.fit.stages.push_back(stage_from_json(s));
    }
    r.get("max_iterations", c.fit.max_iterations);
    r.get("rel_decrease", c.fit.rel_decrease);
    r.get("step_length", c.fit.step_length);
    r.get("memory", c.fit.memory);
    r.get("precondition", c.fit.precondition);
    r.get("huber_scale", c.fit.loss.huber_scale);
    r.get("hinge_kappa", c.fit.loss.hinge_kappa);
    r.get("hinge_eps", c.fit.loss.hinge_eps);
    r.get("pose_prior", c.fit.loss.pose_prior);
    r.get("optimize_cameras", c.fit.optimize_cameras);
    r.get("camera_stage_iterations", c.fit.camera_stage_iterations);
    r.finish();
  }
  if (const json* m = top.child("correspondences")) {
    Reader r(*m, "correspondences");
    r.get("w_min", c.correspondences.w_min);
    r.get("use_weights", c.correspondences.use_weights);
    r.get("uv_tolerance", c.correspondences.uv_tolerance);
    r.finish();
  }
  top.finish();
  validate_scene_config(c);
  return c;
}

SceneConfig load_scene_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scene_config_from_json(ss.str());
}

void save_scene_config(const SceneConfig& config, const std::string& path) {
  detail::write_text_file(path, scene_config_to_json(config) + "\n");
}

}  // namespace proxyfit
