#pragma once

#include "fcalc/core.hpp"

#include <json.hpp>

#include <vector>

namespace fcalc::io {

/// Row-major nested arrays; entries are numbers or [re, im].
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);
std::vector<Matrix> matrices_from_json(const nlohmann::json& j);

}  // namespace fcalc::io
