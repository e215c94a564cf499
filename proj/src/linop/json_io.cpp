#include "fcalc/linop/json_io.hpp"

namespace fcalc::io {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) r.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(r));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw DomainError("matrix must be a non-empty array of rows");
  const Index n = static_cast<Index>(j.size());
  const Index m = static_cast<Index>(j[0].size());
  Matrix out(n, m);
  for (Index i = 0; i < n; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != m)
      throw DomainError("matrix rows must have equal length");
    for (Index k = 0; k < m; ++k) {
      const auto& e = row[static_cast<std::size_t>(k)];
      if (e.is_number())
        out(i, k) = e.get<double>();
      else if (e.is_array() && e.size() == 2)
        out(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
      else
        throw DomainError("matrix entry must be a number or [re, im]");
    }
  }
  return out;
}

std::vector<Matrix> matrices_from_json(const nlohmann::json& j) {
  std::vector<Matrix> out;
  for (const auto& m : j) out.push_back(matrix_from_json(m));
  return out;
}

}  // namespace fcalc::io
