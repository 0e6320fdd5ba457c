#include "proxyfit/model_io.hpp"

#include <cstdio>
#include <fstream>

#include "json_util.hpp"

namespace proxyfit {

using detail::json;

namespace {

constexpr const char* kModelFormat = "proxyfit-body-model";
constexpr const char* kParamsFormat = "proxyfit-pose-params";

json influences_to_json(const std::vector<std::vector<Influence>>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    json r = json::array();
    for (const Influence& inf : row) r.push_back({inf.index, inf.weight});
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::vector<Influence>> influences_from_json(const json& j) {
  std::vector<std::vector<Influence>> rows;
  rows.reserve(j.size());
  for (const json& r : j) {
    std::vector<Influence> row;
    for (const json& e : r) {
      if (!e.is_array() || e.size() != 2) throw ParseError("influence entries must be [index, weight]");
      row.push_back({e[0].get<int>(), e[1].get<double>()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json pca_to_json(const HandPca& pca) {
  json comps = json::array();
  for (Eigen::Index r = 0; r < pca.components.rows(); ++r) comps.push_back(detail::vec_to_json(pca.components.row(r)));
  return {{"joints", pca.joints}, {"mean", detail::vec_to_json(pca.mean)}, {"components", comps}};
}

HandPca pca_from_json(const json& j) {
  HandPca pca;
  pca.joints = j.at("joints").get<std::vector<int>>();
  pca.mean = detail::json_to_vec(j.at("mean"));
  const json& comps = j.at("components");
  const Eigen::Index rows = static_cast<Eigen::Index>(comps.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(comps[0].size()) : 0;
  pca.components.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(comps[r].size()) != cols) throw ParseError("ragged hand PCA component matrix");
    for (Eigen::Index c = 0; c < cols; ++c) pca.components(r, c) = comps[r][c].get<double>();
  }
  return pca;
}

}  // namespace

std::string model_to_json(const BodyModel& m) {
  json j;
  j["format"] = kModelFormat;
  j["version"] = 1;
  json verts = json::array();
  for (int i = 0; i < m.num_vertices(); ++i) verts.push_back(detail::vec_to_json(m.template_vertices.row(i)));
  j["template_vertices"] = std::move(verts);
  j["faces"] = m.faces;
  json uvs = json::array();
  for (const auto& tri : m.corner_uvs) {
    json t = json::array();
    for (const Vec2& uv : tri) t.push_back({uv.x(), uv.y()});
    uvs.push_back(std::move(t));
  }
  j["corner_uvs"] = std::move(uvs);
  j["face_part"] = m.face_part;
  json parts = json::array();
  for (const Part& p : m.parts) {
    parts.push_back({{"name", p.name}, {"side", std::string(to_string(p.side))}, {"hand", p.hand}, {"mirror", p.mirror},
                     {"region", p.region}});
  }
  j["parts"] = std::move(parts);
  json joints = json::array();
  for (int k = 0; k < m.num_joints(); ++k) joints.push_back({{"name", m.joint_names[k]}, {"parent", m.parents[k]}});
  j["joints"] = std::move(joints);
  j["joint_regressor"] = influences_to_json(m.joint_regressor);
  j["skinning_weights"] = influences_to_json(m.skinning);
  // shape_basis[i][axis][k]
  json basis = json::array();
  for (int i = 0; i < m.num_vertices(); ++i) {
    json per_vertex = json::array();
    for (int a = 0; a < 3; ++a) per_vertex.push_back(detail::vec_to_json(m.shape_basis.row(3 * static_cast<Eigen::Index>(i) + a)));
    basis.push_back(std::move(per_vertex));
  }
  j["shape_basis"] = std::move(basis);
  j["num_shape"] = m.num_shape();
  j["pose_joints"] = m.pose_joints;
  j["wrist_joints"] = {m.wrist_joints[0], m.wrist_joints[1]};
  j["hand_pca"] = {{"left", pca_to_json(m.hand_pca[0])}, {"right", pca_to_json(m.hand_pca[1])}};
  return j.dump();
}

BodyModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
  BodyModel m = detail::parse_guard("malformed model file", [&] {
    if (j.at("format").get<std::string>() != kModelFormat) throw ParseError("not a body model file");
    BodyModel out;
    const json& verts = j.at("template_vertices");
    out.template_vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
    for (size_t i = 0; i < verts.size(); ++i)
      out.template_vertices.row(static_cast<Eigen::Index>(i)) = detail::json_to_fixed<3>(verts[i]).transpose();
    out.faces = j.at("faces").get<std::vector<std::array<int, 3>>>();
    for (const json& t : j.at("corner_uvs")) {
      if (t.size() != 3) throw ParseError("corner_uvs entries need 3 corners");
      out.corner_uvs.push_back({detail::json_to_fixed<2>(t[0]), detail::json_to_fixed<2>(t[1]), detail::json_to_fixed<2>(t[2])});
    }
    out.face_part = j.at("face_part").get<std::vector<int>>();
    for (const json& p : j.at("parts")) {
      out.parts.push_back({p.at("name").get<std::string>(), parse_side(p.at("side").get<std::string>()), p.at("hand").get<bool>(),
                           p.at("mirror").get<int>(), p.at("region").get<std::string>()});
    }
    for (const json& jt : j.at("joints")) {
      out.joint_names.push_back(jt.at("name").get<std::string>());
      out.parents.push_back(jt.at("parent").get<int>());
    }
    out.joint_regressor = influences_from_json(j.at("joint_regressor"));
    out.skinning = influences_from_json(j.at("skinning_weights"));
    const json& basis = j.at("shape_basis");
    const Eigen::Index B = j.at("num_shape").get<int>();
    out.shape_basis.resize(3 * static_cast<Eigen::Index>(basis.size()), B);
    for (size_t i = 0; i < basis.size(); ++i) {
      if (basis[i].size() != 3) throw ParseError("shape_basis entries need 3 axes");
      for (int a = 0; a < 3; ++a) {
        const json& row = basis[i][a];
        if (static_cast<Eigen::Index>(row.size()) != B) throw ParseError("shape_basis row length differs from num_shape");
        for (Eigen::Index k = 0; k < B; ++k) out.shape_basis(3 * static_cast<Eigen::Index>(i) + a, k) = row[k].get<double>();
      }
    }
    out.pose_joints = j.at("pose_joints").get<std::vector<int>>();
    const auto wrists = j.at("wrist_joints").get<std::vector<int>>();
    if (wrists.size() != 2) throw ParseError("wrist_joints needs 2 entries");
    out.wrist_joints = {wrists[0], wrists[1]};
    out.hand_pca[0] = pca_from_json(j.at("hand_pca").at("left"));
    out.hand_pca[1] = pca_from_json(j.at("hand_pca").at("right"));
    return out;
  });
  validate_model(m);
  return m;
}

void save_model(const BodyModel& model, const std::string& path) { detail::write_text_file(path, model_to_json(model) + "\n"); }

BodyModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

std::string params_to_json(const PoseParams& p) {
  json j;
  j["format"] = kParamsFormat;
  j["beta"] = detail::vec_to_json(p.beta);
  j["theta"] = detail::vec_to_json(p.theta);
  j["hand_left"] = detail::vec_to_json(p.hand_left);
  j["hand_right"] = detail::vec_to_json(p.hand_right);
  j["global_rot"] = detail::vec_to_json(p.global_rot);
  j["translation"] = detail::vec_to_json(p.translation);
  j["scale"] = p.scale;
  return j.dump(1);
}

PoseParams params_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed params file: ") + e.what());
  }
  return detail::parse_guard("malformed params file", [&] {
    PoseParams p;
    p.beta = detail::json_to_vec(j.at("beta"));
    p.theta = detail::json_to_vec(j.at("theta"));
    p.hand_left = detail::json_to_vec(j.at("hand_left"));
    p.hand_right = detail::json_to_vec(j.at("hand_right"));
    p.global_rot = detail::json_to_fixed<3>(j.at("global_rot"));
    p.translation = detail::json_to_fixed<3>(j.at("translation"));
    p.scale = j.at("scale").get<double>();
    return p;
  });
}

void save_params(const PoseParams& params, const std::string& path) {
  detail::write_text_file(path, params_to_json(params) + "\n");
}

PoseParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return params_from_json(ss.str());
}

void write_obj(const std::string& path, const PosedMesh& mesh, const BodyModel& model) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  char buf[128];
  for (Eigen::Index i = 0; i < mesh.vertices.rows(); ++i) {
    std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", mesh.vertices(i, 0), mesh.vertices(i, 1), mesh.vertices(i, 2));
    out << buf;
  }
  for (const auto& f : model.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

}  // namespace proxyfit
