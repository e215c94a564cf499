#pragma once

#include "fcalc/core.hpp"
#include "fcalc/linop/operator.hpp"

#include <functional>
#include <span>
#include <vector>

namespace fcalc::quad {

// Rectangular support of a scalar weight: x in [x0, x1], |y| in (0, y_max].
// For |y| < y_floor the weight is not integrated; floor_bound() bounds it there.
struct WeightRegion {
  double x0 = 0.0, x1 = 0.0;
  double y_max = 1.0;
  double y_floor = 0.0;
  // hull of the underlying function's support (x_margin is measured from it)
  double core_x0 = -1e300, core_x1 = 1e300;
};

class WeightField {
 public:
  virtual ~WeightField() = default;
  virtual WeightRegion region() const = 0;
  virtual cplx weight(cplx z) const = 0;
  /// out[j] = weight(xs[j] + i y). Override for batched evaluation.
  virtual void weight_row(std::span<const double> xs, double y, std::span<cplx> out) const;
  /// Row-major block: out[i * xs.size() + j] = weight(xs[j] + i ys[i]).
  virtual void weight_rows(std::span<const double> xs, std::span<const double> ys, std::span<cplx> out) const;
  /// Upper bound of |weight| over x in region, y_lo <= |y| <= y_hi.
  virtual double bound(double y_lo, double y_hi) const = 0;
  /// Suggested maximal panel width along x on the segment [x0, x1] between breakpoints.
  virtual double x_scale(double, double) const { return kInf; }
  /// Points in (x0, x1) where the weight is not analytic in x; panels are aligned to them.
  virtual std::vector<double> x_breakpoints() const { return {}; }
  /// Non-analytic levels of |Im z| inside (y_lo, y_hi); layers are split there.
  virtual std::vector<double> y_breakpoints(double, double) const { return {}; }
  /// true when the weight vanishes identically.
  virtual bool is_zero() const { return false; }

  static constexpr double kInf = 1e300;
};

// Matrix-valued integrand factor. Accumulation happens in a working basis
// (Schur basis for resolvents); finalize() maps the accumulator back.
class MatrixField {
 public:
  virtual ~MatrixField() = default;
  virtual Index dim() const = 0;
  /// acc += sum_j w[j] * M(z[j]), acc in the working basis.
  virtual void accumulate(std::span<const cplx> z, std::span<const cplx> w, Matrix& acc) const = 0;
  virtual Matrix finalize(const Matrix& acc) const { return acc; }
  virtual Matrix value(cplx z) const;
  /// Upper bound of the integral of ||M|| over [x0,x1] x [y0,y1].
  virtual double norm_integral_bound(double x0, double x1, double y0, double y1) const = 0;
  /// Interior points where M is singular (integrable 1/r singularities).
  virtual std::vector<cplx> singular_points() const { return {}; }
};

/// Integral of 1/|z - c| over a rectangle, closed form.
double inverse_distance_integral(cplx c, double x0, double x1, double y0, double y1);

// (zI - P)^{-1}, accumulated as (zI - T)^{-1} in the Schur basis.
class ResolventField final : public MatrixField {
 public:
  explicit ResolventField(const Operator& p);
  ResolventField(const Operator& p, const GrowthProfile& growth);

  Index dim() const override { return p_.dim(); }
  void accumulate(std::span<const cplx> z, std::span<const cplx> w, Matrix& acc) const override;
  Matrix finalize(const Matrix& acc) const override { return p_.from_schur(acc); }
  Matrix value(cplx z) const override { return p_.resolvent(z); }
  double norm_integral_bound(double x0, double x1, double y0, double y1) const override;
  const Operator& op() const { return p_; }

 private:
  const Operator& p_;
  GrowthProfile growth_;
  bool has_growth_ = false;
};

// Scalar Cauchy kernel (z - c)^{-1} as a 1x1 field.
class CauchyKernelField final : public MatrixField {
 public:
  explicit CauchyKernelField(cplx c) : c_(c) {}
  Index dim() const override { return 1; }
  void accumulate(std::span<const cplx> z, std::span<const cplx> w, Matrix& acc) const override;
  double norm_integral_bound(double x0, double x1, double y0, double y1) const override;
  std::vector<cplx> singular_points() const override { return {c_}; }

 private:
  cplx c_;
};

// M(z) = I_n.
class IdentityField final : public MatrixField {
 public:
  explicit IdentityField(Index n) : n_(n) {}
  Index dim() const override { return n_; }
  void accumulate(std::span<const cplx> z, std::span<const cplx> w, Matrix& acc) const override;
  double norm_integral_bound(double x0, double x1, double y0, double y1) const override {
    return (x1 - x0) * (y1 - y0);
  }

 private:
  Index n_;
};

// Scalar weight given by a callable, with a user-side bound; used for tests
// and for assembled weights.
class FunctionWeight final : public WeightField {
 public:
  using Fn = std::function<cplx(cplx)>;
  using BoundFn = std::function<double(double, double)>;
  FunctionWeight(Fn f, BoundFn b, WeightRegion r, double x_scale = kInf)
      : f_(std::move(f)), b_(std::move(b)), r_(r), xs_(x_scale) {}
  WeightRegion region() const override { return r_; }
  cplx weight(cplx z) const override { return f_(z); }
  double bound(double lo, double hi) const override { return b_(lo, hi); }
  double x_scale(double, double) const override { return xs_; }

 private:
  Fn f_;
  BoundFn b_;
  WeightRegion r_;
  double xs_;
};

}  // namespace fcalc::quad
