#pragma once

// Immutable expression trees of smooth functions on the real line with exact
// derivatives of every order (tabulated leaves excepted).

#include "fcalc/core.hpp"
#include "fcalc/funcalg/interval_set.hpp"

#include <climits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fcalc {

inline constexpr int kUnboundedOrder = INT_MAX;

class SmoothNode {
 public:
  virtual ~SmoothNode() = default;
  /// out[n] = n-th derivative at x, n = 0..out.size()-1.
  virtual void jet(double x, std::span<cplx> out) const = 0;
  virtual IntervalSet support() const = 0;
  virtual int max_order() const { return kUnboundedOrder; }
  virtual std::string kind() const = 0;
};

class SmoothFunction {
 public:
  SmoothFunction();  // the zero function
  explicit SmoothFunction(std::shared_ptr<const SmoothNode> node);

  static SmoothFunction zero();
  static SmoothFunction bump(double center, double halfwidth);
  static SmoothFunction plateau(double a, double b, double ramp);
  static SmoothFunction polynomial(double center, std::vector<cplx> coeffs);
  static SmoothFunction pole(cplx zeta, int order);
  /// Samples on x0 + i*dx; jets[i] holds derivatives 0..order at node i.
  static SmoothFunction tabulated(double x0, double dx, int order,
                                  std::vector<std::vector<cplx>> jets,
                                  IntervalSet support);

  cplx operator()(double x) const { return eval(x, 0); }
  cplx eval(double x, int k = 0) const;
  void jet(double x, std::span<cplx> out) const;
  std::vector<cplx> jet(double x, int order) const;

  IntervalSet support() const { return node_->support(); }
  int max_order() const { return node_->max_order(); }
  bool is_zero() const;
  std::string kind() const { return node_->kind(); }
  const SmoothNode& node() const { return *node_; }
  const std::shared_ptr<const SmoothNode>& node_ptr() const { return node_; }

  /// max over k<=order of sup|f^(k)|, sampled on the bounded support.
  double sup_norm(int order, int samples = 2000) const;

 private:
  std::shared_ptr<const SmoothNode> node_;
};

SmoothFunction multiply(const SmoothFunction& f, const SmoothFunction& g);
SmoothFunction add(const SmoothFunction& f, const SmoothFunction& g);
SmoothFunction scale(cplx c, const SmoothFunction& f);
SmoothFunction shift(const SmoothFunction& f, double dx);

inline SmoothFunction operator*(const SmoothFunction& f, const SmoothFunction& g) {
  return multiply(f, g);
}
inline SmoothFunction operator+(const SmoothFunction& f, const SmoothFunction& g) {
  return add(f, g);
}
inline SmoothFunction operator*(cplx c, const SmoothFunction& f) { return scale(c, f); }

// Node types are public so serializers and extensions can inspect trees.
namespace nodes {

struct Zero final : SmoothNode {
  void jet(double, std::span<cplx> out) const override;
  IntervalSet support() const override { return {}; }
  std::string kind() const override { return "zero"; }
};

struct Bump final : SmoothNode {
  double center, halfwidth;
  Bump(double c, double h);
  void jet(double x, std::span<cplx> out) const override;
  IntervalSet support() const override;
  std::string kind() const override { return "bump"; }
};

struct Plateau final : SmoothNode {
  double a, b, ramp;
  Plateau(double a_, double b_, double r);
  void jet(double x, std::span<cplx> out) const override;
  IntervalSet support() const override;
  std::string kind() const override { return "plateau"; }
};

struct Polynomial final : SmoothNode {
  double center;
  std::vector<cplx> coeffs;
  Polynomial(double c, std::vector<cplx> k) : center(c), coeffs(std::move(k)) {}
  void jet(double x, std::span<cplx> out) const override;
  IntervalSet support() const override;
  std::string kind() const override { return "polynomial"; }
};

struct Pole final : SmoothNode {
  cplx zeta;
  int order;
  Pole(cplx z, int k);
  void jet(double x, std::span<cplx> out) const override;
  IntervalSet support() const override { return IntervalSet::whole_line(); }
  std::string kind() const override { return "pole"; }
};

struct Product final : SmoothNode {
  std::vector<SmoothFunction> factors;
  explicit Product(std::vector<SmoothFunction> f) : factors(std::move(f)) {}
  void jet(double x, std::span<cplx> out) const override;
  IntervalSet support() const override;
  int max_order() const override;
  std::string kind() const override { return "product"; }
};

struct Sum final : SmoothNode {
  std::vector<SmoothFunction> terms;
  explicit Sum(std::vector<SmoothFunction> t) : terms(std::move(t)) {}
  void jet(double x, std::span<cplx> out) const override;
  IntervalSet support() const override;
  int max_order() const override;
  std::string kind() const override { return "sum"; }
};

struct Scale final : SmoothNode {
  cplx factor;
  SmoothFunction inner;
  Scale(cplx c, SmoothFunction f) : factor(c), inner(std::move(f)) {}
  void jet(double x, std::span<cplx> out) const override;
  IntervalSet support() const override { return inner.support(); }
  int max_order() const override { return inner.max_order(); }
  std::string kind() const override { return "scale"; }
};

struct Shift final : SmoothNode {
  double offset;
  SmoothFunction inner;
  Shift(double d, SmoothFunction f) : offset(d), inner(std::move(f)) {}
  void jet(double x, std::span<cplx> out) const override { inner.jet(x - offset, out); }
  IntervalSet support() const override;
  int max_order() const override { return inner.max_order(); }
  std::string kind() const override { return "shift"; }
};

struct Tabulated final : SmoothNode {
  double x0, dx;
  int order;
  std::vector<std::vector<cplx>> jets;
  IntervalSet supp;
  Tabulated(double x0_, double dx_, int k, std::vector<std::vector<cplx>> j, IntervalSet s);
  void jet(double x, std::span<cplx> out) const override;
  IntervalSet support() const override { return supp; }
  int max_order() const override { return order; }
  std::string kind() const override { return "tabulated"; }
};

}  // namespace nodes

}  // namespace fcalc
