#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "proxyfit/body_model.hpp"
#include "proxyfit/error.hpp"
#include "proxyfit/model_io.hpp"
#include "proxyfit/procedural.hpp"

using namespace proxyfit;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / ("proxyfit_model_io_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(ModelIo, SaveLoadRoundTrip) {
  const BodyModel m = make_procedural_humanoid();
  const fs::path path = temp_dir() / "model.json";
  save_model(m, path.string());
  const BodyModel back = load_model(path.string());
  EXPECT_TRUE(back == m);
  EXPECT_EQ(model_to_json(back), model_to_json(m));
}

TEST(ModelIo, TruncatedFileIsParseError) {
  const BodyModel m = make_procedural_humanoid();
  const std::string text = model_to_json(m);
  const fs::path path = temp_dir() / "truncated.json";
  {
    std::ofstream out(path, std::ios::binary);
    out << text.substr(0, text.size() / 2);
  }
  EXPECT_THROW(load_model(path.string()), ParseError);
  EXPECT_THROW(model_from_json(""), ParseError);
  EXPECT_THROW(load_model((temp_dir() / "missing.json").string()), ParseError);
}

TEST(ModelIo, OverlappingUvNamesThePart) {
  BodyModel m = make_procedural_humanoid();
  const int part = m.find_part("left_upper_arm") >= 0 ? m.find_part("left_upper_arm") : 5;
  std::vector<int> faces;
  for (int f = 0; f < m.num_faces(); ++f)
    if (m.face_part[f] == part) faces.push_back(f);
  ASSERT_GE(faces.size(), 2u);
  m.corner_uvs[faces[1]] = m.corner_uvs[faces[0]];
  try {
    model_from_json(model_to_json(m));
    FAIL() << "overlap accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("'" + m.parts[part].name + "'"), std::string::npos) << e.what();
  }
}

TEST(ModelIo, ParamsRoundTripIsExact) {
  const BodyModel m = make_procedural_humanoid();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  PoseParams p = PoseParams::zeros(m);
  for (Eigen::Index i = 0; i < p.theta.size(); ++i) p.theta[i] = n(rng) / 3.0;
  for (Eigen::Index i = 0; i < p.beta.size(); ++i) p.beta[i] = n(rng);
  p.hand_left[0] = 1.0 / 3.0;
  p.global_rot = Vec3(0.1, -0.2, 0.3);
  p.translation = Vec3(1e-17, 2.5, -3.0);
  p.scale = 1.0 + 1e-15;
  const PoseParams back = params_from_json(params_to_json(p));
  EXPECT_EQ(back.theta, p.theta);
  EXPECT_EQ(back.beta, p.beta);
  EXPECT_EQ(back.hand_left, p.hand_left);
  EXPECT_EQ(back.hand_right, p.hand_right);
  EXPECT_EQ(back.global_rot, p.global_rot);
  EXPECT_EQ(back.translation, p.translation);
  EXPECT_EQ(back.scale, p.scale);
  EXPECT_THROW(params_from_json("{\"theta\": [1, 2"), ParseError);
}

TEST(ModelIo, ObjHasOneRecordPerVertexAndFace) {
  const BodyModel m = make_procedural_humanoid();
  const fs::path path = temp_dir() / "mesh.obj";
  write_obj(path.string(), forward(m, PoseParams::zeros(m)), m);
  std::istringstream in(slurp(path));
  int v = 0, f = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) == 0) ++v;
    if (line.rfind("f ", 0) == 0) ++f;
  }
  EXPECT_EQ(v, m.num_vertices());
  EXPECT_EQ(f, m.num_faces());
}
