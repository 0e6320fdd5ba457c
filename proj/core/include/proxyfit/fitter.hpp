#pragma once

#include <span>
#include <string>
#include <vector>

#include "proxyfit/body_model.hpp"
#include "proxyfit/correspondence.hpp"
#include "proxyfit/lbfgs.hpp"
#include "proxyfit/loss.hpp"

namespace proxyfit {

enum class Block { kGlobalRot, kTranslation, kScale, kBodyPose, kWristPose, kShape, kHandPose, kCameras };

std::string_view to_string(Block block);
Block parse_block(std::string_view name);

// Which correspondences a stage sees.
enum class StageData {
  kBody,  // every correspondence from body views
  kHand,  // hand-crop views plus hand-part pixels of body views
  kAll,
};

std::string_view to_string(StageData data);
StageData parse_stage_data(std::string_view name);

struct StageSpec {
  std::string name;
  std::vector<Block> blocks;
  StageData data = StageData::kBody;
  int max_iterations = -1;     // -1: FitConfig::max_iterations
  double rel_decrease = -1.0;  // <= 0: FitConfig::rel_decrease
};

// global -> scale -> body pose -> body pose + shape -> wrists -> fingers
std::vector<StageSpec> default_stages();
// default_stages() followed by two tight-tolerance joint stages (body blocks
// on body data, then every non-camera block on all data) and a final pass
// of the wrist and finger stages.
std::vector<StageSpec> extended_stages();
// Cameras (rig 0 frozen) jointly with global pose, scale, body pose and shape.
StageSpec camera_stage();

struct FitConfig {
  std::vector<StageSpec> stages = default_stages();
  int max_iterations = 30;
  double rel_decrease = 0.01;
  double step_length = 1e-2;
  int memory = 10;
  // Rescale each stage's parameters by the diagonal of the Gauss-Newton
  // Hessian at the stage start. step_length then applies in the rescaled space.
  bool precondition = true;
  LossOptions loss;
  bool optimize_cameras = false;
  int camera_stage_iterations = 60;
};

// Throws ValidationError for an invalid config.
void validate_fit_config(const FitConfig& config);

struct StageReport {
  std::string name;
  std::vector<double> trajectory;
  int iterations = 0;
  int evaluations = 0;
  int correspondences = 0;
  std::string stop_reason;
};

struct ViewResidual {
  int view = 0;
  int count = 0;
  double mean = 0.0;    // pixels
  double median = 0.0;  // pixels
  double weighted_sq = 0.0;
};

struct FitReport {
  std::vector<StageReport> stages;
  PoseParams params;
  std::vector<CameraDelta> camera_deltas;  // per rig camera; empty if cameras were not optimised
  std::vector<ViewResidual> residuals;
  std::vector<std::string> warnings;
  double final_loss = 0.0;
  double wall_seconds = 0.0;
  bool aborted = false;
};

// Runs the configured stages in order. A stage with no correspondences is
// skipped (and reported); non-finite loss aborts with the partial report.
FitReport fit(const BodyModel& model, std::span<const FitView> views, std::span<const Correspondence> corrs,
              const PoseParams& init, const FitConfig& config = {});

// Runs camera_stage() alone from `params`. Throws ValidationError with fewer
// than two rig cameras.
FitReport refine_cameras(const BodyModel& model, std::span<const FitView> views, std::span<const Correspondence> corrs,
                         const PoseParams& params, const FitConfig& config = {});

// Least-squares intersection of the rays through `pixels`. With a single ray
// the point is placed at the distance from that camera to the world origin.
Vec3 triangulate_rays(std::span<const Camera> cams, std::span<const Vec2> pixels);

// Flat parameter vector for a set of blocks; exposed for gradient checks.
class ParamPacker {
 public:
  ParamPacker(const BodyModel& model, std::vector<Block> blocks, int num_rigs);

  int size() const { return size_; }
  Eigen::VectorXd pack(const PoseParams& params, std::span<const CameraDelta> deltas) const;
  void unpack(const Eigen::VectorXd& x, PoseParams& params, std::vector<CameraDelta>& deltas) const;
  Eigen::VectorXd pack_gradient(const LossResult& loss) const;

 private:
  template <typename P, typename D, typename F>
  void visit(P& params, D& deltas, F&& f) const;

  const BodyModel* model_;
  std::vector<Block> blocks_;
  int num_rigs_;
  std::vector<int> body_slots_;
  std::vector<int> wrist_slots_;
  int size_ = 0;
};

}  // namespace proxyfit
