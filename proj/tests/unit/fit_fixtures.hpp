#pragma once

// Noiseless fitting problem built through the scene pipeline.

#include <vector>

#include "proxyfit/correspondence.hpp"
#include "proxyfit/pipeline.hpp"
#include "scene_fixtures.hpp"

namespace fixture {

struct Problem {
  proxyfit::Scene scene;
  proxyfit::FitInputs inputs;
  std::vector<proxyfit::Correspondence> corrs;
};

inline proxyfit::SceneConfig clean_config(std::uint64_t seed, int views) {
  proxyfit::SceneConfig c;
  c.seed = seed;
  c.rig.n_views = views;
  c.k = 1;
  c.corruption = {};
  return c;
}

inline Problem clean_problem(std::uint64_t seed, int views, bool hands = true) {
  using namespace proxyfit;
  Problem p;
  p.scene = synthesize_scene(clean_config(seed, views), &model());
  const SceneAggregates aggs = aggregate_scene(p.scene);
  FitOptions fo;
  fo.hands = hands;
  p.inputs = prepare_fit_inputs(p.scene, aggs, fo);
  const UvIndex index(p.scene.model);
  p.corrs = extract_correspondences(p.inputs.aggs, p.inputs.kinds, index, p.scene.model);
  return p;
}

}  // namespace fixture
