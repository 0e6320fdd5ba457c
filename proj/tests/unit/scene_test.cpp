#include <gtest/gtest.h>

#include "proxyfit/error.hpp"
#include "proxyfit/scene.hpp"

using namespace proxyfit;

TEST(SceneConfig, DefaultRoundTrip) {
  const SceneConfig c;
  const std::string text = scene_config_to_json(c);
  EXPECT_EQ(scene_config_to_json(scene_config_from_json(text)), text);
}

TEST(SceneConfig, CustomRoundTrip) {
  SceneConfig c;
  c.seed = 77;
  c.k = 3;
  c.rig.n_views = 6;
  c.corruption.uv_sigma = 0.03;
  c.corruption.region_flip_prob = 0.25;
  c.camera_perturbation.rotation_deg = 2.0;
  c.init.mode = InitMode::kGtPerturbed;
  c.fit.stages = extended_stages();
  c.fit.stages[2].rel_decrease = 1e-5;
  c.fit.precondition = false;
  c.correspondences.use_weights = false;
  const SceneConfig back = scene_config_from_json(scene_config_to_json(c));
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.k, 3);
  EXPECT_EQ(back.rig.n_views, 6);
  EXPECT_EQ(back.corruption, c.corruption);
  EXPECT_EQ(back.camera_perturbation.rotation_deg, 2.0);
  EXPECT_EQ(back.init.mode, InitMode::kGtPerturbed);
  ASSERT_EQ(back.fit.stages.size(), c.fit.stages.size());
  for (size_t i = 0; i < c.fit.stages.size(); ++i) {
    EXPECT_EQ(back.fit.stages[i].name, c.fit.stages[i].name);
    EXPECT_EQ(back.fit.stages[i].blocks, c.fit.stages[i].blocks);
    EXPECT_EQ(back.fit.stages[i].data, c.fit.stages[i].data);
    EXPECT_EQ(back.fit.stages[i].max_iterations, c.fit.stages[i].max_iterations);
    EXPECT_EQ(back.fit.stages[i].rel_decrease, c.fit.stages[i].rel_decrease);
  }
  EXPECT_FALSE(back.fit.precondition);
  EXPECT_FALSE(back.correspondences.use_weights);
  EXPECT_EQ(scene_config_to_json(back), scene_config_to_json(c));
}

TEST(SceneConfig, MissingKeysKeepDefaults) {
  const SceneConfig c = scene_config_from_json(R"({"seed": 9, "rig": {"n_views": 2}})");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.rig.n_views, 2);
  EXPECT_EQ(c.k, SceneConfig{}.k);
  EXPECT_EQ(c.rig.radius, RigConfig{}.radius);
}

TEST(SceneConfig, UnknownOrMalformedInputIsRejected) {
  EXPECT_THROW(scene_config_from_json(R"({"views": 4})"), ParseError);
  EXPECT_THROW(scene_config_from_json(R"({"rig": {"count": 4}})"), ParseError);
  EXPECT_THROW(scene_config_from_json(R"({"seed": 1)"), ParseError);
  EXPECT_THROW(scene_config_from_json(R"({"fit": {"stages": [{"name": "x", "blocks": ["elbows"]}]}})"), ParseError);
}

TEST(SceneConfig, ValidationCatchesBadValues) {
  SceneConfig c;
  EXPECT_NO_THROW(validate_scene_config(c));
  c.k = 0;
  EXPECT_THROW(validate_scene_config(c), ValidationError);
  c = {};
  c.rig.n_views = 0;
  EXPECT_THROW(validate_scene_config(c), ValidationError);
  c = {};
  c.corruption.dropout_prob = 2.0;
  EXPECT_THROW(validate_scene_config(c), ValidationError);
  c = {};
  c.fit.step_length = -1.0;
  EXPECT_THROW(validate_scene_config(c), ValidationError);
}
