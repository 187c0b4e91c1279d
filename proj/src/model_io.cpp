#include "riccap/model_io.hpp"

#include <fstream>
#include <sstream>

#include "riccap/errors.hpp"

namespace riccap {
namespace {

using nlohmann::json;

double number(const json& j, const std::string& name) {
  if (!j.is_number()) throw ModelError(name + " has a non-numeric entry");
  return j.get<double>();
}

const json* field(const json& section, const char* key) {
  auto it = section.find(key);
  if (it == section.end() || it->is_null()) return nullptr;
  return &*it;
}

Matrix optional_matrix(const json& section, const char* key, Eigen::Index rows, Eigen::Index cols) {
  const json* j = field(section, key);
  if (j == nullptr) return Matrix::Zero(rows, cols);
  return matrix_from_json(*j, key, rows, cols);
}

Matrix required_matrix(const json& section, const char* key, const std::string& where) {
  const json* j = field(section, key);
  if (j == nullptr) throw ModelError(where + "." + key + " is missing");
  return matrix_from_json(*j, key);
}

Vector optional_vector(const json& section, const char* key, Eigen::Index size) {
  const json* j = field(section, key);
  if (j == nullptr) return Vector::Zero(size);
  if (j->is_number()) return Vector::Constant(1, number(*j, key));
  if (!j->is_array()) throw ModelError(std::string(key) + " is not an array");
  if (j->empty()) return Vector::Zero(size);
  // Accept both [a, b] and [[a], [b]].
  const Matrix M = matrix_from_json(*j, key);
  if (M.rows() == 1) return M.row(0).transpose();
  if (M.cols() == 1) return M.col(0);
  throw ModelError(std::string(key) + " is not a vector");
}

// The size of the square matrix under `key`, or 0 when absent or empty.
Eigen::Index square_dim(const json& section, const char* key) {
  const json* j = field(section, key);
  if (j == nullptr) return 0;
  return matrix_from_json(*j, key).rows();
}

NoiseModel parse_noise(const json& s) {
  if (!s.is_object()) throw ModelError("noise is not an object");
  NoiseModel m;
  m.K_W = required_matrix(s, "K_W", "noise");
  m.N = required_matrix(s, "N", "noise");
  const Eigen::Index ns = square_dim(s, "A");
  const Eigen::Index nw = m.K_W.rows(), ny = m.N.rows();
  m.A = optional_matrix(s, "A", ns, ns);
  m.B = optional_matrix(s, "B", ns, nw);
  m.C = optional_matrix(s, "C", ny, ns);
  m.K_S1 = optional_matrix(s, "K_S1", ns, ns);
  m.mu_S1 = optional_vector(s, "mu_S1", ns);
  return m;
}

InputModel parse_input(const json& s) {
  if (!s.is_object()) throw ModelError("input is not an object");
  InputModel m;
  m.K_Z = required_matrix(s, "K_Z", "input");
  m.D = required_matrix(s, "D", "input");
  const Eigen::Index nxi = square_dim(s, "F");
  const Eigen::Index nz = m.K_Z.rows(), nx = m.D.rows();
  m.F = optional_matrix(s, "F", nxi, nxi);
  m.G = optional_matrix(s, "G", nxi, nz);
  m.Gamma = optional_matrix(s, "Gamma", nx, nxi);
  m.K_Xi1 = optional_matrix(s, "K_Xi1", nxi, nxi);
  m.mu_Xi1 = optional_vector(s, "mu_Xi1", nxi);
  return m;
}

Channel parse_channel(const json& s) {
  if (!s.is_object()) throw ModelError("channel is not an object");
  Channel c;
  c.H = required_matrix(s, "H", "channel");
  const json* kappa = field(s, "kappa");
  c.kappa = kappa == nullptr ? 0.0 : number(*kappa, "kappa");
  return c;
}

}  // namespace

Matrix matrix_from_json(const json& j, const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  if (j.is_number()) return Matrix::Constant(1, 1, number(j, name));
  if (!j.is_array()) throw ModelError(name + " is not a matrix");
  if (j.empty()) return Matrix::Zero(rows, cols);
  if (!j.front().is_array()) {
    Matrix M(1, static_cast<Eigen::Index>(j.size()));
    for (std::size_t c = 0; c < j.size(); ++c) M(0, static_cast<Eigen::Index>(c)) = number(j[c], name);
    return M;
  }
  const std::size_t width = j.front().size();
  Matrix M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.size() != width) throw ModelError(name + " is not rectangular");
    for (std::size_t c = 0; c < width; ++c) {
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(row[c], name);
    }
  }
  // [[]] or [[], []] carry no columns; keep the declared shape when it fits.
  if (width == 0 && cols == 0 && rows == M.rows()) return Matrix::Zero(rows, 0);
  return M;
}

json matrix_to_json(const Eigen::Ref<const Matrix>& M) {
  json out = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

json vector_to_json(const Eigen::Ref<const Vector>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

ModelDocument parse_model(const json& doc) {
  if (!doc.is_object()) throw ModelError("model document is not a JSON object");
  const json* noise = field(doc, "noise");
  if (noise == nullptr) throw ModelError("model document has no noise section");
  ModelDocument out;
  out.noise = parse_noise(*noise);
  if (const json* input = field(doc, "input")) out.input = parse_input(*input);
  if (const json* channel = field(doc, "channel")) out.channel = parse_channel(*channel);
  return out;
}

ModelDocument parse_model_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("malformed JSON: ") + e.what());
  }
  return parse_model(doc);
}

ModelDocument load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot read model file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_model_text(text.str());
}

json to_json(const NoiseModel& noise) {
  return {{"A", matrix_to_json(noise.A)},     {"B", matrix_to_json(noise.B)},
          {"C", matrix_to_json(noise.C)},     {"N", matrix_to_json(noise.N)},
          {"K_W", matrix_to_json(noise.K_W)}, {"K_S1", matrix_to_json(noise.K_S1)},
          {"mu_S1", vector_to_json(noise.mu_S1)}};
}

json to_json(const InputModel& input) {
  return {{"F", matrix_to_json(input.F)},         {"G", matrix_to_json(input.G)},
          {"Gamma", matrix_to_json(input.Gamma)}, {"D", matrix_to_json(input.D)},
          {"K_Z", matrix_to_json(input.K_Z)},     {"K_Xi1", matrix_to_json(input.K_Xi1)},
          {"mu_Xi1", vector_to_json(input.mu_Xi1)}};
}

json to_json(const Channel& channel) {
  return {{"H", matrix_to_json(channel.H)}, {"kappa", channel.kappa}};
}

}  // namespace riccap
