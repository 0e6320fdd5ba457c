#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "proxyfit/model_io.hpp"
#include "proxyfit/pipeline.hpp"
#include "scene_fixtures.hpp"

using namespace proxyfit;
namespace fs = std::filesystem;

namespace {

fs::path temp_root() {
  static const fs::path root = [] {
    const fs::path p = fs::temp_directory_path() / ("proxyfit_pipeline_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SceneConfig small_config(std::uint64_t seed) {
  SceneConfig c;
  c.seed = seed;
  c.k = 3;
  c.rig.n_views = 3;
  c.corruption.uv_sigma = 0.02;
  c.corruption.label_flip_prob = 0.02;
  return c;
}

#ifdef PROXYFIT_CLI_PATH
int run_cli(const std::string& args) {
  const std::string cmd = std::string(PROXYFIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}
#endif

}  // namespace

TEST(Pipeline, CleanSingleSampleEqualsGroundTruth) {
  SceneConfig c = small_config(3);
  c.k = 1;
  c.corruption = {};
  const Scene s = synthesize_scene(c, &fixture::model());
  ASSERT_EQ(s.samples.size(), s.gt_proxies.size());
  for (size_t v = 0; v < s.samples.size(); ++v) {
    ASSERT_EQ(s.samples[v].size(), 1u);
    EXPECT_EQ(s.samples[v][0], s.gt_proxies[v]);
  }
  const SceneAggregates aggs = aggregate_scene(s);
  for (const AggregatedProxy& a : aggs.body)
    for (int y = 0; y < a.height; ++y)
      for (int x = 0; x < a.width; ++x)
        if (a.label(x, y) != kBackground) ASSERT_EQ(a.weight.at(x, y), 1.0f);
}

TEST(Pipeline, RegionFlipRaisesSegUncertaintyOnTheRegion) {
  SceneConfig c = small_config(4);
  c.corruption = {};
  c.corruption.region_flip_prob = 1.0;
  c.k = 1;
  const Scene clean = synthesize_scene(c, &fixture::model());
  // Mix one flipped sample with clean ones: u_seg is positive exactly where
  // the flipped sample disagrees.
  for (size_t v = 0; v < clean.samples.size(); ++v) {
    const Proxy& flipped = clean.samples[v][0];
    const Proxy& gt = clean.gt_proxies[v];
    const std::vector<Proxy> mix{gt, flipped, gt};
    const AggregatedProxy a = aggregate(mix, clean.palette, PaletteSubset::kAll);
    for (int y = 0; y < a.height; ++y)
      for (int x = 0; x < a.width; ++x) {
        const bool differs = decode_pixel(flipped, x, y, clean.palette).part != decode_pixel(gt, x, y, clean.palette).part;
        ASSERT_EQ(a.u_seg.at(x, y) > 0.0f, differs) << "view " << v << " " << x << "," << y;
      }
  }
}

TEST(Pipeline, EvalOfGroundTruthIsZero) {
  const Scene s = synthesize_scene(small_config(5), &fixture::model());
  const PosedMesh mesh = forward(s.model, s.gt_params);
  const MetricReport r = joint_and_vertex_errors(mesh, s.gt_mesh);
  EXPECT_EQ(r.mpjpe, 0.0);
  EXPECT_LT(r.pa_mpjpe, 1e-12);
}

TEST(Pipeline, StridedViews) {
  EXPECT_EQ(strided_views(8, 2), (std::vector<int>{0, 4}));
  EXPECT_EQ(strided_views(8, 4), (std::vector<int>{0, 2, 4, 6}));
  EXPECT_EQ(strided_views(3, 3), (std::vector<int>{0, 1, 2}));
}

TEST(Pipeline, SceneFilesRoundTrip) {
  const Scene s = synthesize_scene(small_config(6), &fixture::model());
  const fs::path dir = temp_root() / "roundtrip";
  write_scene(s, dir.string());
  const Scene back = load_scene(dir.string());
  EXPECT_TRUE(back.model == s.model);
  EXPECT_EQ(back.palette, s.palette);
  EXPECT_EQ(back.cameras, s.cameras);
  EXPECT_EQ(back.gt_proxies, s.gt_proxies);
  EXPECT_EQ(back.samples, s.samples);
  EXPECT_EQ(params_to_json(back.gt_params), params_to_json(s.gt_params));
}

#ifdef PROXYFIT_CLI_PATH

TEST(Cli, FullPipelineIsDeterministic) {
  const fs::path root = temp_root() / "cli_det";
  fs::create_directories(root);
  save_scene_config(small_config(7), (root / "config.json").string());
  std::string manifests[2];
  for (int run = 0; run < 2; ++run) {
    const std::string dir = (root / ("scene" + std::to_string(run))).string();
    fs::remove_all(dir);
    ASSERT_EQ(run_cli("synth --config " + (root / "config.json").string() + " --out " + dir), 0);
    ASSERT_EQ(run_cli("aggregate " + dir), 0);
    ASSERT_EQ(run_cli("fit " + dir), 0);
    ASSERT_EQ(run_cli("eval " + dir), 0);
    manifests[run] = slurp(fs::path(dir) / "manifest.json");
    EXPECT_TRUE(fs::exists(fs::path(dir) / "fit" / "fitted_params.json"));
    EXPECT_TRUE(fs::exists(fs::path(dir) / "fit" / "metrics.json"));
  }
  EXPECT_FALSE(manifests[0].empty());
  EXPECT_TRUE(manifests[0] == manifests[1]);
}

TEST(Cli, EvalCsvNamesScenesRelativeToCsv) {
  const fs::path root = temp_root() / "cli_csv";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string cfg = (root / "config.json").string();
  save_scene_config(small_config(9), cfg);
  const std::string a = (root / "a").string(), b = (root / "b").string();
  for (const std::string& dir : {a, b}) {
    ASSERT_EQ(run_cli("synth --config " + cfg + " --out " + dir), 0);
    ASSERT_EQ(run_cli("aggregate " + dir), 0);
    ASSERT_EQ(run_cli("fit " + dir), 0);
  }
  ASSERT_EQ(run_cli("eval " + a + " " + b), 0);
  const std::string csv = slurp(root / "a" / "metrics.csv");
  EXPECT_EQ(csv.find(root.string()), std::string::npos);
  EXPECT_NE(csv.find("\n.,"), std::string::npos);
  EXPECT_NE(csv.find("\n../b,"), std::string::npos);
}

TEST(Cli, SingleViewFitWarns) {
  const fs::path dir = temp_root() / "cli_views";
  ASSERT_EQ(run_cli("synth --seed 8 --out " + dir.string()), 0);
  ASSERT_EQ(run_cli("aggregate " + dir.string()), 0);
  ASSERT_EQ(run_cli("fit " + dir.string() + " --views 1 --no-hands"), 0);
  EXPECT_NE(slurp(dir / "fit" / "fit_report.json").find("depth"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  const fs::path root = temp_root() / "cli_exit";
  fs::create_directories(root);
  {
    std::ofstream(root / "bad_value.json") << R"({"k": 0})";
    std::ofstream(root / "bad_key.json") << R"({"kk": 3})";
    std::ofstream(root / "truncated.json") << R"({"k": 3)";
  }
  EXPECT_EQ(run_cli("synth --config " + (root / "bad_value.json").string() + " --out " + (root / "a").string()), 2);
  EXPECT_EQ(run_cli("synth --config " + (root / "bad_key.json").string() + " --out " + (root / "a").string()), 2);
  EXPECT_EQ(run_cli("synth --config " + (root / "truncated.json").string() + " --out " + (root / "a").string()), 2);
  EXPECT_EQ(run_cli("fit " + (root / "missing").string()), 2);
  EXPECT_EQ(run_cli("no_such_command"), 2);
  EXPECT_EQ(run_cli("--help"), 0);
  // Output path below a regular file cannot be created.
  std::ofstream(root / "file") << "x";
  EXPECT_EQ(run_cli("synth --seed 1 --out " + (root / "file" / "scene").string()), 1);
}

#endif
