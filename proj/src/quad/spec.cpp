#include "fcalc/quad/spec.hpp"

#include "fcalc/core.hpp"

namespace fcalc::quad {

void QuadratureSpec::validate() const {
  if (nx < 1 || ny < 1) throw DomainError("quadrature spec: panel counts must be positive");
  if (q < 2 || q > 64) throw DomainError("quadrature spec: Gauss order out of range");
  if (!(ratio > 1.0)) throw DomainError("quadrature spec: ratio must exceed 1");
  if (!(y_min > 0.0) || !(y_max > y_min)) throw DomainError("quadrature spec: need 0 < y_min < y_max");
  if (!(aspect > 0.0) || !(max_aspect >= aspect)) throw DomainError("quadrature spec: bad aspect");
  if (!(tolerance > 0.0)) throw DomainError("quadrature spec: tolerance must be positive");
  if (node_budget < 1 || threads < 1 || subdivide < 1 || max_refinements < 0) throw DomainError("quadrature spec: bad limits");
}

QuadratureSpec QuadratureSpec::refined() const {
  QuadratureSpec s = *this;
  s.subdivide *= 2;
  return s;
}

nlohmann::json to_json(const QuadratureSpec& s) {
  return {{"nx", s.nx},
          {"ny", s.ny},
          {"q", s.q},
          {"ratio", s.ratio},
          {"y_min", s.y_min},
          {"y_max", s.y_max},
          {"x_margin", s.x_margin},
          {"aspect", s.aspect},
          {"max_aspect", s.max_aspect},
          {"subdivide", s.subdivide},
          {"tolerance", s.tolerance},
          {"skip_tolerance", s.skip_tolerance},
          {"node_budget", s.node_budget},
          {"max_refinements", s.max_refinements},
          {"threads", s.threads}};
}

QuadratureSpec spec_from_json(const nlohmann::json& j, const QuadratureSpec& base) {
  if (!j.is_object()) throw DomainError("quadrature spec must be a JSON object");
  QuadratureSpec s = base;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("nx", s.nx);
  get("ny", s.ny);
  get("q", s.q);
  get("ratio", s.ratio);
  get("y_min", s.y_min);
  get("y_max", s.y_max);
  get("x_margin", s.x_margin);
  get("aspect", s.aspect);
  get("max_aspect", s.max_aspect);
  get("subdivide", s.subdivide);
  get("tolerance", s.tolerance);
  get("skip_tolerance", s.skip_tolerance);
  get("node_budget", s.node_budget);
  get("max_refinements", s.max_refinements);
  get("threads", s.threads);
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* known[] = {"nx",     "ny",        "q",         "ratio",          "y_min",
                                  "y_max",  "x_margin",  "aspect",    "max_aspect",     "tolerance", "subdivide",
                                  "skip_tolerance", "node_budget", "max_refinements", "threads"};
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw DomainError("quadrature spec: unknown key '" + it.key() + "'");
  }
  s.validate();
  return s;
}

}  // namespace fcalc::quad
