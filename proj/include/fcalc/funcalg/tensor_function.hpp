#pragma once

#include "fcalc/funcalg/e_function.hpp"
#include "fcalc/funcalg/smooth_function.hpp"

#include <span>
#include <vector>

namespace fcalc {

struct TensorTerm {
  cplx weight{1.0};
  std::vector<SmoothFunction> factors;
};

// sum_t w_t prod_j f_{t,j}(x_j)
class TensorFunction {
 public:
  TensorFunction() = default;
  explicit TensorFunction(std::vector<TensorTerm> terms);

  int arity() const { return arity_; }
  const std::vector<TensorTerm>& terms() const { return terms_; }

  cplx operator()(std::span<const double> x) const;
  TensorFunction operator+(const TensorFunction& other) const;
  TensorFunction scaled(cplx c) const;

  /// Pointwise product (term-by-term tensor products of factors).
  TensorFunction operator*(const TensorFunction& other) const;

  /// x -> f(x, ..., x) as a one-variable function.
  SmoothFunction diagonal() const;

  /// Bounding boxes of each term, one interval per variable.
  std::vector<std::vector<Interval>> support_boxes() const;

 private:
  int arity_ = 0;
  std::vector<TensorTerm> terms_;
};

TensorFunction tensorize(std::vector<SmoothFunction> factors);

/// h = g o f tabulated with derivatives to `order`; g must vanish near a0(f).
SmoothFunction compose_smooth(const SmoothFunction& g, const EFunction& f, int order = 8,
                              int cells = 1024);

}  // namespace fcalc
