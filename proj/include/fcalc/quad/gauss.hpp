#pragma once

#include <vector>

namespace fcalc::quad {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes, weights;
};

/// Cached; safe to call concurrently.
const GaussRule& gauss_legendre(int order);

}  // namespace fcalc::quad
