#pragma once

// Almost-holomorphic extensions of compactly supported smooth functions,
// exposed to the quadrature as the scalar weight dbar f~.

#include "fcalc/funcalg/e_function.hpp"
#include "fcalc/funcalg/smooth_function.hpp"
#include "fcalc/funcalg/tensor_function.hpp"
#include "fcalc/quad/fields.hpp"

#include <json.hpp>

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fcalc::ahx {

enum class Method { fourier, taylor, pole_exact };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

class Extension1D : public quad::WeightField {
 public:
  virtual Method method() const = 0;
  /// f~(z)
  virtual cplx value(cplx z) const = 0;
  /// dbar f~(z), from its own closed form
  virtual cplx dbar(cplx z) const = 0;
  /// Vanishing order of dbar f~ at the axis; +inf for the Fourier method.
  virtual double decay_order() const = 0;
  virtual nlohmann::json diagnostics() const { return nlohmann::json::object(); }
  /// Bound of |f~(f) - f| over the support on the real line.
  virtual double restriction_error() const { return 0.0; }

  cplx weight(cplx z) const override { return dbar(z); }
};

using Extension1DPtr = std::shared_ptr<const Extension1D>;

struct FourierOptions {
  double xi_max = 200.0;       // starting frequency cutoff
  double xi_cap = 4000.0;      // never extend past this
  double dxi = 0.0;            // 0: chosen from the support width
  double inner_margin = 0.05;  // re-cutoff is 1 on supp f +- inner
  double outer_margin = 0.2;   // and 0 beyond supp f +- outer
  double restriction_tol = 1e-9;  // relative to max(1, sup|f|)
  bool auto_extend = true;
  int gauss_order = 24;
};

/// f^(xi) = integral of f(x) exp(-i x xi) on xi_k = k*dxi, |k| <= K, K = round(xi_max/dxi).
std::vector<cplx> fourier_samples(const SmoothFunction& f, double xi_max, double dxi, int gauss_order = 24);

Extension1DPtr extend_fourier(const SmoothFunction& f, const FourierOptions& opt = {});

struct TaylorOptions {
  int order = 8;      // N
  double h = 0.0;     // strip half-width; 0: min(width/2, 1)
  int sup_samples = 4000;
};

Extension1DPtr extend_taylor(const SmoothFunction& f, const TaylorOptions& opt = {});

/// c (zeta - z)^{-k} times a cutoff that removes a disc around zeta.
class PoleExtension final : public Extension1D {
 public:
  PoleExtension(cplx coeff, cplx zeta, int order);
  Method method() const override { return Method::pole_exact; }
  cplx value(cplx z) const override;
  cplx dbar(cplx z) const override;
  double decay_order() const override { return 1e300; }
  quad::WeightRegion region() const override;
  double bound(double y_lo, double y_hi) const override;
  /// dbar f~ is supported in r/2 <= |z - zeta| <= r.
  double radius() const { return r_; }
  cplx zeta() const { return zeta_; }
  cplx coeff() const { return c_; }
  int order() const { return k_; }

 private:
  cplx c_, zeta_;
  int k_;
  double r_;
};

std::shared_ptr<const PoleExtension> extend_pole(const PoleTerm& term);

struct ExtensionOptions {
  Method method = Method::fourier;
  FourierOptions fourier;
  TaylorOptions taylor;
};

/// Dispatch on method; Taylor order is lowered to max_order - 1 for
/// functions with finitely many derivatives.
Extension1DPtr extend(const SmoothFunction& f, const ExtensionOptions& opt);

struct ExtensionTerm {
  cplx weight;
  std::vector<Extension1DPtr> factors;
};

class ExtensionMD {
 public:
  ExtensionMD() = default;
  ExtensionMD(std::size_t arity, std::vector<ExtensionTerm> terms);

  std::size_t arity() const { return arity_; }
  const std::vector<ExtensionTerm>& terms() const { return terms_; }
  cplx value(std::span<const cplx> z) const;
  /// dbar_1 ... dbar_m f~, the product of factor dbar's per term.
  cplx mixed_dbar(std::span<const cplx> z) const;

 private:
  std::size_t arity_ = 0;
  std::vector<ExtensionTerm> terms_;
};

/// Factors are shared between terms when the underlying node is shared.
ExtensionMD extend_md(const TensorFunction& f, const ExtensionOptions& opt);

struct DecayRow {
  double y;
  double sup_dbar;
};

/// sup over the x-support of |dbar f~(x + i y)| at each y.
std::vector<DecayRow> dbar_decay(const Extension1D& e, std::span<const double> ys);
/// Least-squares slope of log2 sup_dbar against log2 y.
double decay_slope(const std::vector<DecayRow>& rows);
void write_decay_csv(std::ostream& os, const std::vector<DecayRow>& rows);

}  // namespace fcalc::ahx
