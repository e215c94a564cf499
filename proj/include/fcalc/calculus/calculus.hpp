#pragma once

// f(P), f(P1, ..., Pm) and friends through resolvent integrals of
// almost-holomorphic extensions.

#include "fcalc/ahx/extension.hpp"
#include "fcalc/funcalg/e_function.hpp"
#include "fcalc/funcalg/tensor_function.hpp"
#include "fcalc/linop/operator.hpp"
#include "fcalc/quad/plane.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fcalc::calculus {

struct CalculusOptions {
  ahx::ExtensionOptions extension;
  /// Per-plane spec; unset means the single- or multi-variable default.
  std::optional<quad::QuadratureSpec> spec;
  /// Refine until error_estimate <= tolerance (else one pass at the spec).
  bool refine = false;
  double tolerance = 1e-8;
  long budget = 200'000'000;
};

struct CalculusResult {
  Matrix value;
  double error_estimate = 0.0;  // quadrature estimate plus neglected bound, in units of value
  double neglected = 0.0;
  ahx::Method method = ahx::Method::fourier;
  quad::QuadratureSpec spec;
  long node_count = 0;
  std::vector<quad::TraceRow> trace;
  nlohmann::json diagnostics = nlohmann::json::object();
};

/// f(P) = -(1/pi) integral of dbar f~(z) (z - P)^{-1}.
CalculusResult apply_single(const SmoothFunction& f, const Operator& p, const CalculusOptions& opt = {});

/// f(P1, ..., Pm) with the P1 resolvent leftmost.
CalculusResult apply_multi(const TensorFunction& f, const OperatorTuple& t, const CalculusOptions& opt = {});

/// Resolvents composed in `order` (variable indices, leftmost first).
CalculusResult apply_ordered(const TensorFunction& f, const OperatorTuple& t, const std::vector<int>& order,
                             const CalculusOptions& opt = {});

/// m = 2: inner pass g(x1) = middle * f(x1, P2) as a matrix-valued function,
/// then the outer single-operator integral with g's dbar to the right of the
/// resolvent. middle defaults to the identity.
CalculusResult apply_iterated(const TensorFunction& f, const OperatorTuple& t, const CalculusOptions& opt = {},
                              const Matrix* middle = nullptr);

enum class EPath { exact, integral };

/// a0 + poles + compact part; the integral path integrates the pole cutoffs
/// over their annuli and the compact part over the plane.
CalculusResult apply_E(const EFunction& f, const Operator& p, EPath path, const CalculusOptions& opt = {});

using CircleFn = std::function<cplx(double)>;  // g(e^{i theta}) as a function of theta

struct CircleResult {
  Matrix value;
  double tail_bound = 0.0;  // sum over N < |n| <= 2N of |c_n| ||B^n||
  std::vector<cplx> coefficients;  // c_{-N}..c_N
  int N = 0;
};

/// sum_{|n| <= N} c_n B^n with c_n from a trapezoid rule on 4N angles.
CircleResult apply_circle(const CircleFn& g, const Operator& b, int N = 64, double circle_tol = 1e-8);

/// theta -> f(C^{-1}(e^{i theta})), the pullback of a compactly supported f
/// to the circle (zero at theta = 0, the image of infinity).
CircleFn circle_pullback(const SmoothFunction& f);

// An abstract map EFunction -> matrices, checked for multiplicativity on registration.
class CalculusHomomorphism {
 public:
  using Eval = std::function<Matrix(const EFunction&)>;
  CalculusHomomorphism(Eval eval, Index dim, std::string provenance, double mult_tol = 1e-6,
                       std::uint64_t seed = 11);

  static CalculusHomomorphism from_operator(const Operator& p, EPath path, const CalculusOptions& opt = {});

  Matrix operator()(const EFunction& f) const { return eval_(f); }
  Index dim() const { return dim_; }
  const std::string& provenance() const { return provenance_; }
  /// Worst ||Op(f g) - Op(f) Op(g)|| seen at registration.
  double multiplicativity_defect() const { return defect_; }

 private:
  Eval eval_;
  Index dim_;
  std::string provenance_;
  double defect_ = 0.0;
};

struct Recovery {
  Matrix generator;          // Op(x omega_z) Op(omega_z)^{-1}
  Matrix generator_alt;      // same at the second point
  double z_independence = 0.0;
  double resolvent_condition = 0.0;
};

/// Throws SingularityError when Op(omega_z) is singular and ConvergenceError
/// when the two points disagree by more than tol.
Recovery recover_generator(const CalculusHomomorphism& op, cplx z, cplx z_alt = cplx(2.0, 3.0),
                           double tol = 1e-8);

struct Composition {
  Matrix lhs;  // g applied to f(P)
  Matrix rhs;  // (g o f)(P)
  CalculusResult lhs_result, rhs_result;
  SpectrumCertificate inner_spectrum;
};

Composition compose_calculus(const SmoothFunction& g, const EFunction& f, const Operator& p,
                             const CalculusOptions& opt = {});

nlohmann::json to_json(const CalculusResult& r);

}  // namespace fcalc::calculus
