#pragma once

#include <json.hpp>

namespace fcalc::quad {

struct QuadratureSpec {
  int nx = 16;              // minimum panels across x per layer
  int ny = 12;              // minimum geometric layers per half-plane
  int q = 8;                // Gauss order per panel direction
  double ratio = 2.0;       // maximal layer height ratio
  double y_min = 1e-4;      // below this the weight is treated as zero
  double y_max = 1.0;       // cap on the integrated |Im z|
  double x_margin = 0.5;    // cap on how far x may extend past the core support
  double aspect = 2.0;      // base panel width / height
  double max_aspect = 8.0;
  int subdivide = 1;        // every panel split into subdivide x subdivide pieces
  double tolerance = 1e-8;
  double skip_tolerance = 1e-13;  // layers whose a-priori bound is below this are skipped
  long node_budget = 50'000'000;
  int max_refinements = 4;
  int threads = 1;

  static QuadratureSpec single_default() { return {}; }
  static QuadratureSpec multi_default() {
    QuadratureSpec s;
    s.nx = 10;
    s.ny = 8;
    s.q = 6;
    return s;
  }
  void validate() const;
  /// One refinement step: every panel halved in both directions.
  QuadratureSpec refined() const;
  /// The companion rule used for the error estimate.
  int coarse_q() const { return q > 2 ? q - 2 : 1; }
};

nlohmann::json to_json(const QuadratureSpec& s);
/// Missing keys keep `base` values.
QuadratureSpec spec_from_json(const nlohmann::json& j, const QuadratureSpec& base = {});

}  // namespace fcalc::quad
