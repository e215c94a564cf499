#pragma once

// Functions of the form  a0 + sum c (zeta - x)^{-k} + compact(x).
// The pole family is closed under products via partial fractions, so this is
// a multiplication-closed algebra of smooth functions with expansions at infinity.

#include "fcalc/funcalg/smooth_function.hpp"

#include <vector>

namespace fcalc {

struct PoleTerm {
  cplx coeff;
  cplx zeta;
  int order;
};

class EFunction {
 public:
  EFunction() = default;
  EFunction(cplx a0, std::vector<PoleTerm> poles, SmoothFunction compact = {});

  static EFunction constant(cplx a0);
  /// omega_z(x) = 1/(z - x)
  static EFunction omega(cplx z);
  static EFunction compact(SmoothFunction f);

  cplx a0() const { return a0_; }
  const std::vector<PoleTerm>& poles() const { return poles_; }
  const SmoothFunction& compact_part() const { return compact_; }

  cplx operator()(double x) const;
  /// Derivatives 0..out.size()-1 at x.
  void jet(double x, std::span<cplx> out) const;

  /// a_0..a_n of f(x) ~ sum a_k x^{-k} as |x| -> infinity.
  std::vector<cplx> asymptotic_coefficients(int n) const;

  /// Poles in conjugate pairs with conjugate coefficients, real a0, and a
  /// compact part that is real on a sample grid.
  bool is_real_on_line(double tol = 1e-12) const;

  /// |f(x) - a0| <= bound for |x| >= radius (pole terms only, beyond the compact part).
  double tail_bound(double radius) const;

 private:
  void normalize();
  cplx a0_{0.0};
  std::vector<PoleTerm> poles_;
  SmoothFunction compact_;
};

EFunction multiply_E(const EFunction& f, const EFunction& g);
EFunction add_E(const EFunction& f, const EFunction& g);
EFunction scale_E(cplx c, const EFunction& f);

}  // namespace fcalc
