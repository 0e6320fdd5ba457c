#pragma once

#include <cstdint>

#include "proxyfit/body_model.hpp"

namespace proxyfit {

// Desk-scale articulated humanoid built from tapered tubes, one tube per
// joint. 24 body parts + 12 hand parts (two palms, ten fingers), every
// part owning its own [0,1]^2 uv chart.
struct HumanoidConfig {
  int vertex_budget = 1500;
  int finger_segments = 3;
  int hand_components = 6;
  int shape_components = 10;
  int body_sides = 8;    // angular resolution of body tubes (even)
  int finger_sides = 6;  // angular resolution of finger tubes
  std::uint64_t seed = 7;

  bool operator==(const HumanoidConfig&) const = default;
};

// Throws ValidationError when the budget cannot hold every part.
BodyModel make_procedural_humanoid(const HumanoidConfig& config = {});

// Smallest vertex budget accepted for `config` (all other fields fixed).
int minimum_vertex_budget(const HumanoidConfig& config);

}  // namespace proxyfit
