#pragma once

#include <string>

#include "proxyfit/body_model.hpp"

namespace proxyfit {

// Body model file: one JSON document, see docs/formats.md.
std::string model_to_json(const BodyModel& model);
BodyModel model_from_json(const std::string& text);  // validates invariants
void save_model(const BodyModel& model, const std::string& path);
BodyModel load_model(const std::string& path);

std::string params_to_json(const PoseParams& params);
PoseParams params_from_json(const std::string& text);
void save_params(const PoseParams& params, const std::string& path);
PoseParams load_params(const std::string& path);

// ASCII OBJ with v/f records.
void write_obj(const std::string& path, const PosedMesh& mesh, const BodyModel& model);

}  // namespace proxyfit
