#pragma once

#include <nlohmann/json.hpp>

#include "toxblend/common.hpp"

namespace toxblend::nn {

/// {"rows", "cols", "data"} with data in row-major order.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);

}  // namespace toxblend::nn
