#pragma once

#include "fcalc/funcalg/e_function.hpp"
#include "fcalc/funcalg/smooth_function.hpp"
#include "fcalc/funcalg/tensor_function.hpp"

#include <json.hpp>

namespace fcalc::io {

using json = nlohmann::json;

json complex_to_json(cplx c);
/// Accepts [re, im] or a bare number.
cplx complex_from_json(const json& j);

json to_json(const SmoothFunction& f);
SmoothFunction smooth_from_json(const json& j);

json to_json(const EFunction& f);
/// Accepts the full {a0, poles, compact} form or a bare smooth-function node.
EFunction efunction_from_json(const json& j);

json to_json(const TensorFunction& f);
/// Accepts {terms:[...]} or a bare array of factor nodes (single term).
TensorFunction tensor_from_json(const json& j);

}  // namespace fcalc::io
