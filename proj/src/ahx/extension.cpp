#include "fcalc/ahx/extension.hpp"

#include "fcalc/funcalg/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace fcalc::ahx {

std::string to_string(Method m) {
  switch (m) {
    case Method::fourier: return "fourier";
    case Method::taylor: return "taylor";
    case Method::pole_exact: return "pole-exact";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "fourier") return Method::fourier;
  if (s == "taylor") return Method::taylor;
  if (s == "pole-exact") return Method::pole_exact;
  throw DomainError("unknown extension method '" + s + "'");
}

namespace {

class ZeroExtension final : public Extension1D {
 public:
  explicit ZeroExtension(Method m) : m_(m) {}
  Method method() const override { return m_; }
  cplx value(cplx) const override { return 0.0; }
  cplx dbar(cplx) const override { return 0.0; }
  double decay_order() const override { return 1e300; }
  quad::WeightRegion region() const override { return {}; }
  double bound(double, double) const override { return 0.0; }
  bool is_zero() const override { return true; }

 private:
  Method m_;
};

}  // namespace

PoleExtension::PoleExtension(cplx coeff, cplx zeta, int order)
    : c_(coeff), zeta_(zeta), k_(order), r_(0.5 * std::abs(zeta.imag())) {
  if (zeta.imag() == 0.0) throw DomainError("extend_pole: pole on the real axis");
  if (order < 1) throw DomainError("extend_pole: order must be positive");
}

cplx PoleExtension::value(cplx z) const {
  const double d = std::abs(z - zeta_);
  const double rho = 1.0 - mollifier::chi(d / r_);
  if (rho == 0.0) return 0.0;
  return c_ * std::pow(zeta_ - z, -k_) * rho;
}

cplx PoleExtension::dbar(cplx z) const {
  const cplx u = z - zeta_;
  const double d = std::abs(u);
  const double cp = mollifier::chi_prime(d / r_);
  if (cp == 0.0) return 0.0;
  return -c_ * std::pow(zeta_ - z, -k_) * cp * u / (2.0 * r_ * d);
}

quad::WeightRegion PoleExtension::region() const {
  quad::WeightRegion r;
  r.x0 = zeta_.real() - r_;
  r.x1 = zeta_.real() + r_;
  r.y_max = std::abs(zeta_.imag()) + r_;
  r.y_floor = std::abs(zeta_.imag()) - r_;
  return r;
}

double PoleExtension::bound(double y_lo, double y_hi) const {
  const double a = std::abs(zeta_.imag());
  if (y_hi < a - r_ || y_lo > a + r_) return 0.0;
  return std::abs(c_) * std::pow(0.5 * r_, -k_) * mollifier::chi_prime_sup() / (2.0 * r_);
}

std::shared_ptr<const PoleExtension> extend_pole(const PoleTerm& term) {
  return std::make_shared<PoleExtension>(term.coeff, term.zeta, term.order);
}

Extension1DPtr extend(const SmoothFunction& f, const ExtensionOptions& opt) {
  if (f.is_zero()) return std::make_shared<ZeroExtension>(opt.method);
  switch (opt.method) {
    case Method::fourier: return extend_fourier(f, opt.fourier);
    case Method::taylor: {
      TaylorOptions t = opt.taylor;
      if (f.max_order() != kUnboundedOrder) t.order = std::min(t.order, f.max_order() - 1);
      return extend_taylor(f, t);
    }
    case Method::pole_exact: break;
  }
  throw DomainError("extend: pole-exact extensions are built from pole terms");
}

ExtensionMD::ExtensionMD(std::size_t arity, std::vector<ExtensionTerm> terms)
    : arity_(arity), terms_(std::move(terms)) {
  for (const auto& t : terms_)
    if (t.factors.size() != arity_) throw DomainError("ExtensionMD: term arity mismatch");
}

cplx ExtensionMD::value(std::span<const cplx> z) const {
  if (z.size() != arity_) throw DomainError("ExtensionMD: wrong number of arguments");
  cplx s = 0.0;
  for (const auto& t : terms_) {
    cplx p = t.weight;
    for (std::size_t j = 0; j < arity_ && p != cplx(0.0); ++j) p *= t.factors[j]->value(z[j]);
    s += p;
  }
  return s;
}

cplx ExtensionMD::mixed_dbar(std::span<const cplx> z) const {
  if (z.size() != arity_) throw DomainError("ExtensionMD: wrong number of arguments");
  cplx s = 0.0;
  for (const auto& t : terms_) {
    cplx p = t.weight;
    for (std::size_t j = 0; j < arity_ && p != cplx(0.0); ++j) p *= t.factors[j]->dbar(z[j]);
    s += p;
  }
  return s;
}

ExtensionMD extend_md(const TensorFunction& f, const ExtensionOptions& opt) {
  std::map<const SmoothNode*, Extension1DPtr> cache;
  std::vector<ExtensionTerm> terms;
  for (const TensorTerm& t : f.terms()) {
    ExtensionTerm e{t.weight, {}};
    for (const SmoothFunction& g : t.factors) {
      auto& slot = cache[&g.node()];
      if (!slot) slot = extend(g, opt);
      e.factors.push_back(slot);
    }
    terms.push_back(std::move(e));
  }
  return ExtensionMD(static_cast<std::size_t>(f.arity()), std::move(terms));
}

std::vector<DecayRow> dbar_decay(const Extension1D& e, std::span<const double> ys) {
  const quad::WeightRegion r = e.region();
  std::vector<DecayRow> rows;
  for (const double y : ys) {
    const double sp = std::min(0.25 * std::abs(y), (r.x1 - r.x0) / 400.0);
    const int n = std::max(2, static_cast<int>(std::ceil((r.x1 - r.x0) / sp)));
    std::vector<double> xs(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) xs[i] = r.x0 + (r.x1 - r.x0) * i / n;
    std::vector<cplx> w(xs.size());
    e.weight_row(xs, y, w);
    double s = 0.0;
    for (const cplx v : w) s = std::max(s, std::abs(v));
    rows.push_back({y, s});
  }
  return rows;
}

double decay_slope(const std::vector<DecayRow>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rows) {
    if (!(r.sup_dbar > 0.0)) continue;
    const double lx = std::log2(r.y), ly = std::log2(r.sup_dbar);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 1e300;  // identically zero rows decay at every rate
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_decay_csv(std::ostream& os, const std::vector<DecayRow>& rows) {
  os << "y,sup_dbar\n";
  os.precision(17);
  for (const auto& r : rows) os << r.y << ',' << r.sup_dbar << '\n';
}

}  // namespace fcalc::ahx
