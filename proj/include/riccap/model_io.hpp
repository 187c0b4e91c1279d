#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "riccap/models.hpp"

namespace riccap {

/// Contents of a JSON model document. The input and channel sections are
/// optional so that noise-only files work with noise-only subcommands.
struct ModelDocument {
  NoiseModel noise;
  std::optional<InputModel> input;
  std::optional<Channel> channel;
};

/// Reads a matrix written as nested row-major arrays. A bare number is a 1×1
/// matrix, a flat array is a single row, and `[]` is an empty matrix of shape
/// rows×cols. Throws ModelError naming the field on ragged rows or
/// non-numeric entries.
Matrix matrix_from_json(const nlohmann::json& j, const std::string& name, Eigen::Index rows = 0,
                        Eigen::Index cols = 0);
nlohmann::json matrix_to_json(const Eigen::Ref<const Matrix>& M);
nlohmann::json vector_to_json(const Eigen::Ref<const Vector>& v);

/// Missing state matrices mean a zero-dimensional state; missing initial
/// covariances and means are zero. Dimensions are inferred from K_W, N, K_Z
/// and D. The result is not validated.
ModelDocument parse_model(const nlohmann::json& doc);
/// Throws ModelError on malformed JSON.
ModelDocument parse_model_text(std::string_view text);
/// Throws ModelError if the file cannot be read or parsed.
ModelDocument load_model(const std::string& path);

nlohmann::json to_json(const NoiseModel& noise);
nlohmann::json to_json(const InputModel& input);
nlohmann::json to_json(const Channel& channel);

}  // namespace riccap
