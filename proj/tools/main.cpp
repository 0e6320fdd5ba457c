// proxyfit command-line driver: synth | aggregate | fit | eval | sweep

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "proxyfit/error.hpp"
#include "proxyfit/model_io.hpp"
#include "proxyfit/pipeline.hpp"

namespace fs = std::filesystem;
using namespace proxyfit;

namespace {

SceneConfig config_from(const std::string& path, const std::optional<std::uint64_t>& seed) {
  SceneConfig c = path.empty() ? SceneConfig{} : load_scene_config(path);
  if (seed) c.seed = *seed;
  validate_scene_config(c);
  return c;
}

std::vector<int> parse_values(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "on") out.push_back(1);
    else if (item == "off") out.push_back(0);
    else {
      try {
        out.push_back(std::stoi(item));
      } catch (const std::exception&) {
        throw ValidationError("bad sweep value '" + item + "'");
      }
    }
  }
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error("cannot write " + path);
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dense-correspondence human mesh fitting"};
  app.require_subcommand(1);

  std::string config_path, out, scene_dir, fit_dir, axis = "views", values_text;
  std::optional<std::uint64_t> seed;
  FitOptions fo;
  bool no_tts = false, no_hands = false, no_weighting = false;
  int count = 20;
  std::vector<std::string> eval_scenes;

  auto* synth = app.add_subcommand("synth", "synthesise a scene: model, rig, ground truth and K corrupted samples");
  synth->add_option("--config", config_path, "scene config JSON");
  synth->add_option("--seed", seed, "override the config seed");
  synth->add_option("--out", out, "scene directory")->required();

  auto* aggregate = app.add_subcommand("aggregate", "aggregate samples, locate hands, build crop views");
  aggregate->add_option("scene", scene_dir, "scene directory")->required();

  auto* fit = app.add_subcommand("fit", "fit the body model to a scene's aggregated proxies");
  fit->add_option("scene", scene_dir, "scene directory")->required();
  fit->add_option("--out", out, "output directory (default <scene>/fit)");
  fit->add_flag("--no-tts", no_tts, "single sample (K = 1), no aggregation");
  fit->add_option("--k", fo.k, "number of samples to aggregate");
  fit->add_flag("--no-hands", no_hands, "ignore hand-crop views");
  fit->add_option("--views", fo.views, "number of body views (strided subset)");
  fit->add_flag("--refine-cameras", fo.refine_cameras, "jointly refine cameras (camera 0 fixed)");
  fit->add_flag("--no-weighting", no_weighting, "uniform pixel weights");

  auto* eval = app.add_subcommand("eval", "score fitted parameters against ground truth");
  eval->add_option("scenes", eval_scenes, "scene directories")->required();
  eval->add_option("--fit-dir", fit_dir, "fit directory name inside each scene (default fit)");
  eval->add_option("--out", out, "CSV path (default <first scene>/metrics.csv)");

  auto* sweep = app.add_subcommand("sweep", "ablation sweep over views | K | weighting");
  sweep->add_option("--config", config_path, "scene config JSON");
  sweep->add_option("--seed", seed, "first scene seed");
  sweep->add_option("--axis", axis, "views | K | weighting");
  sweep->add_option("--values", values_text, "comma-separated values (default per axis)");
  sweep->add_option("--count", count, "number of seeded scenes");
  sweep->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*synth) {
      const Scene scene = synthesize_scene(config_from(config_path, seed));
      write_scene(scene, out);
      std::cout << "wrote scene to " << out << " (" << scene.cameras.size() << " views, K=" << scene.config.k << ")\n";
    } else if (*aggregate) {
      const Scene scene = load_scene(scene_dir);
      const SceneAggregates aggs = aggregate_scene(scene);
      write_aggregates(scene, aggs, scene_dir);
      std::cout << "aggregated " << aggs.body.size() << " body views, " << aggs.crops.size() << " hand crops\n";
    } else if (*fit) {
      if (no_tts) fo.k = 1;
      fo.hands = !no_hands;
      fo.weighting = !no_weighting;
      const Scene scene = load_scene(scene_dir);
      const SceneAggregates aggs = load_aggregates(scene, scene_dir);
      const FitOutcome res = fit_scene(scene, aggs, fo);
      const std::string dir = out.empty() ? scene_dir + "/fit" : out;
      write_fit_outputs(scene, res, fo, dir);
      if (out.empty() || fs::weakly_canonical(dir).string().rfind(fs::weakly_canonical(scene_dir).string(), 0) == 0)
        write_manifest(scene_dir);
      for (const std::string& w : res.report.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << "fit " << res.correspondences << " correspondences, final loss " << res.report.final_loss << ", "
                << res.report.wall_seconds << " s\n";
      if (res.report.aborted) return 1;
    } else if (*eval) {
      const std::string csv_path = out.empty() ? eval_scenes.front() + "/metrics.csv" : out;
      const fs::path csv_dir = fs::absolute(fs::path(csv_path)).lexically_normal().parent_path();
      std::string csv = "scene,mpjpe,pa_mpjpe,mpvpe,pa_mpvpe,hand_mpjpe,hand_pa_mpjpe,hand_mpvpe,hand_pa_mpvpe\n";
      for (const std::string& dir : eval_scenes) {
        const Scene scene = load_scene(dir);
        const std::string fdir = dir + "/" + (fit_dir.empty() ? "fit" : fit_dir);
        const PoseParams params = load_params(fdir + "/fitted_params.json");
        check_params(scene.model, params);
        const PosedMesh mesh = forward(scene.model, params);
        const MetricReport body = joint_and_vertex_errors(mesh, scene.gt_mesh);
        const MetricReport hands = joint_and_vertex_errors(mesh, scene.gt_mesh, hand_subset(scene.model));
        write_file(fdir + "/metrics.json", metrics_to_json(body, hands) + "\n");
        // scene paths are relative to the CSV's directory
        const std::string name = fs::absolute(dir).lexically_normal().lexically_relative(csv_dir).generic_string();
        char buf[512];
        std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", name.c_str(), body.mpjpe, body.pa_mpjpe,
                      body.mpvpe, body.pa_mpvpe, hands.mpjpe, hands.pa_mpjpe, hands.mpvpe, hands.pa_mpvpe);
        csv += buf;
        std::cout << dir << ": MPJPE " << body.mpjpe << "  PA-MPJPE " << body.pa_mpjpe << "  hand MPJPE " << hands.mpjpe
                  << "\n";
      }
      write_file(csv_path, csv);
      for (const std::string& dir : eval_scenes) write_manifest(dir);
    } else if (*sweep) {
      const SweepAxis ax = parse_sweep_axis(axis);
      std::vector<int> values = parse_values(values_text);
      if (values.empty()) {
        values = ax == SweepAxis::kViews ? std::vector<int>{2, 4, 8}
                 : ax == SweepAxis::kK   ? std::vector<int>{1, 3, 5, 10}
                                         : std::vector<int>{1, 0};
      }
      const SweepResult res = run_sweep(config_from(config_path, seed), ax, values, count);
      write_sweep(res, out);
      std::cout << "sweep over " << to_string(ax) << " written to " << out << "\n";
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
