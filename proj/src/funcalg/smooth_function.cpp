#include "fcalc/funcalg/smooth_function.hpp"

#include "fcalc/funcalg/mollifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace fcalc {

namespace {

void check_order(std::span<cplx> out, int max_order, const char* what) {
  if (max_order != kUnboundedOrder && static_cast<long>(out.size()) - 1 > max_order)
    throw DomainError(std::string(what) + ": derivative order " +
                      std::to_string(out.size() - 1) + " exceeds available order " +
                      std::to_string(max_order));
}

}  // namespace

SmoothFunction::SmoothFunction() : node_(std::make_shared<nodes::Zero>()) {}

SmoothFunction::SmoothFunction(std::shared_ptr<const SmoothNode> node)
    : node_(std::move(node)) {
  if (!node_) node_ = std::make_shared<nodes::Zero>();
}

SmoothFunction SmoothFunction::zero() { return SmoothFunction(); }

SmoothFunction SmoothFunction::bump(double center, double halfwidth) {
  return SmoothFunction(std::make_shared<nodes::Bump>(center, halfwidth));
}

SmoothFunction SmoothFunction::plateau(double a, double b, double ramp) {
  return SmoothFunction(std::make_shared<nodes::Plateau>(a, b, ramp));
}

SmoothFunction SmoothFunction::polynomial(double center, std::vector<cplx> coeffs) {
  return SmoothFunction(std::make_shared<nodes::Polynomial>(center, std::move(coeffs)));
}

SmoothFunction SmoothFunction::pole(cplx zeta, int order) {
  return SmoothFunction(std::make_shared<nodes::Pole>(zeta, order));
}

SmoothFunction SmoothFunction::tabulated(double x0, double dx, int order,
                                         std::vector<std::vector<cplx>> jets,
                                         IntervalSet support) {
  return SmoothFunction(
      std::make_shared<nodes::Tabulated>(x0, dx, order, std::move(jets), std::move(support)));
}

cplx SmoothFunction::eval(double x, int k) const {
  if (k < 0) throw DomainError("negative derivative order");
  if (k == 0) {
    cplx v;
    node_->jet(x, std::span<cplx>(&v, 1));
    return v;
  }
  std::vector<cplx> out(static_cast<std::size_t>(k) + 1);
  node_->jet(x, out);
  return out[k];
}

void SmoothFunction::jet(double x, std::span<cplx> out) const { node_->jet(x, out); }

std::vector<cplx> SmoothFunction::jet(double x, int order) const {
  std::vector<cplx> out(static_cast<std::size_t>(order) + 1);
  node_->jet(x, out);
  return out;
}

bool SmoothFunction::is_zero() const {
  return dynamic_cast<const nodes::Zero*>(node_.get()) != nullptr || support().empty();
}

double SmoothFunction::sup_norm(int order, int samples) const {
  const auto s = support();
  if (s.empty()) return 0.0;
  if (!s.bounded()) throw DomainError("sup_norm needs bounded support");
  const auto h = s.hull();
  std::vector<cplx> j(static_cast<std::size_t>(order) + 1);
  double m = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double x = h.lo + (h.hi - h.lo) * i / samples;
    node_->jet(x, j);
    for (const auto& v : j) m = std::max(m, std::abs(v));
  }
  return m;
}

SmoothFunction multiply(const SmoothFunction& f, const SmoothFunction& g) {
  if (f.is_zero() || g.is_zero()) return SmoothFunction::zero();
  std::vector<SmoothFunction> fs;
  for (const auto* h : {&f, &g}) {
    if (auto p = dynamic_cast<const nodes::Product*>(&h->node()))
      fs.insert(fs.end(), p->factors.begin(), p->factors.end());
    else
      fs.push_back(*h);
  }
  auto node = std::make_shared<nodes::Product>(std::move(fs));
  if (node->support().empty()) return SmoothFunction::zero();
  return SmoothFunction(node);
}

SmoothFunction add(const SmoothFunction& f, const SmoothFunction& g) {
  if (f.is_zero()) return g;
  if (g.is_zero()) return f;
  std::vector<SmoothFunction> ts;
  for (const auto* h : {&f, &g}) {
    if (auto s = dynamic_cast<const nodes::Sum*>(&h->node()))
      ts.insert(ts.end(), s->terms.begin(), s->terms.end());
    else
      ts.push_back(*h);
  }
  return SmoothFunction(std::make_shared<nodes::Sum>(std::move(ts)));
}

SmoothFunction scale(cplx c, const SmoothFunction& f) {
  if (c == cplx(0.0) || f.is_zero()) return SmoothFunction::zero();
  if (c == cplx(1.0)) return f;
  if (auto s = dynamic_cast<const nodes::Scale*>(&f.node()))
    return SmoothFunction(std::make_shared<nodes::Scale>(c * s->factor, s->inner));
  return SmoothFunction(std::make_shared<nodes::Scale>(c, f));
}

SmoothFunction shift(const SmoothFunction& f, double dx) {
  if (f.is_zero() || dx == 0.0) return f;
  return SmoothFunction(std::make_shared<nodes::Shift>(dx, f));
}

namespace nodes {

void Zero::jet(double, std::span<cplx> out) const { std::fill(out.begin(), out.end(), 0.0); }

Bump::Bump(double c, double h) : center(c), halfwidth(h) {
  if (!(h > 0.0)) throw DomainError("bump halfwidth must be positive");
}

void Bump::jet(double x, std::span<cplx> out) const {
  std::vector<double> r(out.size());
  mollifier::bump_jet((x - center) / halfwidth, r);
  double s = 1.0;
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = r[n] * s;
    s /= halfwidth;
  }
}

IntervalSet Bump::support() const {
  return IntervalSet::single(center - halfwidth, center + halfwidth);
}

Plateau::Plateau(double a_, double b_, double r) : a(a_), b(b_), ramp(r) {
  if (!(b_ >= a_) || !(r > 0.0)) throw DomainError("plateau needs a <= b and ramp > 0");
}

void Plateau::jet(double x, std::span<cplx> out) const {
  std::array<double, 24> fixed;
  std::vector<double> heap;
  if (out.size() > fixed.size()) heap.resize(out.size());
  const std::span<double> r = heap.empty() ? std::span<double>(fixed.data(), out.size()) : std::span<double>(heap);
  double sc;
  if (x < a) {
    mollifier::step_jet((a - x) / ramp, r);
    sc = -1.0 / ramp;
  } else if (x > b) {
    mollifier::step_jet((x - b) / ramp, r);
    sc = 1.0 / ramp;
  } else {
    std::fill(out.begin(), out.end(), 0.0);
    if (!out.empty()) out[0] = 1.0;
    return;
  }
  double s = 1.0;
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = r[n] * s;
    s *= sc;
  }
}

IntervalSet Plateau::support() const { return IntervalSet::single(a - ramp, b + ramp); }

void Polynomial::jet(double x, std::span<cplx> out) const {
  const double u = x - center;
  const std::size_t deg = coeffs.size();
  for (std::size_t n = 0; n < out.size(); ++n) {
    cplx acc = 0.0;
    // Horner on sum_{m>=n} c_m m!/(m-n)! u^{m-n}
    for (std::size_t m = deg; m-- > n;) {
      double ff = 1.0;
      for (std::size_t t = m - n + 1; t <= m; ++t) ff *= static_cast<double>(t);
      acc = acc * u + coeffs[m] * ff;
    }
    out[n] = acc;
  }
}

IntervalSet Polynomial::support() const {
  for (const auto& c : coeffs)
    if (c != cplx(0.0)) return IntervalSet::whole_line();
  return {};
}

Pole::Pole(cplx z, int k) : zeta(z), order(k) {
  if (z.imag() == 0.0) throw DomainError("pole kernel needs Im zeta != 0");
  if (k < 1) throw DomainError("pole order must be >= 1");
}

void Pole::jet(double x, std::span<cplx> out) const {
  const cplx inv = 1.0 / (zeta - x);
  cplx p = std::pow(inv, order);
  double rising = 1.0;
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = rising * p;
    rising *= static_cast<double>(order + static_cast<int>(n));
    p *= inv;
  }
}

void Product::jet(double x, std::span<cplx> out) const {
  const std::size_t K = out.size();
  std::fill(out.begin(), out.end(), 0.0);
  if (K == 0) return;
  out[0] = 1.0;
  std::vector<cplx> fj(K), acc(K);
  for (const auto& f : factors) {
    f.jet(x, fj);
    // Leibniz: (uv)^(n) = sum_j C(n,j) u^(j) v^(n-j)
    for (std::size_t n = 0; n < K; ++n) {
      cplx s = 0.0;
      double binom = 1.0;
      for (std::size_t j = 0; j <= n; ++j) {
        s += binom * out[j] * fj[n - j];
        binom = binom * static_cast<double>(n - j) / static_cast<double>(j + 1);
      }
      acc[n] = s;
    }
    std::copy(acc.begin(), acc.end(), out.begin());
  }
}

IntervalSet Product::support() const {
  IntervalSet s = IntervalSet::whole_line();
  for (const auto& f : factors) s = s.intersect(f.support());
  return s;
}

int Product::max_order() const {
  int m = kUnboundedOrder;
  for (const auto& f : factors) m = std::min(m, f.max_order());
  return m;
}

void Sum::jet(double x, std::span<cplx> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<cplx> tj(out.size());
  for (const auto& t : terms) {
    t.jet(x, tj);
    for (std::size_t n = 0; n < out.size(); ++n) out[n] += tj[n];
  }
}

IntervalSet Sum::support() const {
  IntervalSet s;
  for (const auto& t : terms) s = s.unite(t.support());
  return s;
}

int Sum::max_order() const {
  int m = kUnboundedOrder;
  for (const auto& t : terms) m = std::min(m, t.max_order());
  return m;
}

void Scale::jet(double x, std::span<cplx> out) const {
  inner.jet(x, out);
  for (auto& v : out) v *= factor;
}

IntervalSet Shift::support() const {
  auto s = inner.support();
  std::vector<Interval> parts = s.parts();
  for (auto& iv : parts) {
    iv.lo += offset;
    iv.hi += offset;
  }
  return IntervalSet(std::move(parts));
}

Tabulated::Tabulated(double x0_, double dx_, int k, std::vector<std::vector<cplx>> j,
                     IntervalSet s)
    : x0(x0_), dx(dx_), order(k), jets(std::move(j)), supp(std::move(s)) {
  if (!(dx_ > 0.0) || k < 0 || jets.empty()) throw DomainError("bad tabulated grid");
  for (const auto& row : jets)
    if (static_cast<int>(row.size()) != k + 1)
      throw DomainError("tabulated jets must hold derivatives 0..order");
}

void Tabulated::jet(double x, std::span<cplx> out) const {
  check_order(out, order, "tabulated node");
  std::fill(out.begin(), out.end(), 0.0);
  if (!supp.contains(x)) return;
  const double pos = (x - x0) / dx;
  const long i = std::lround(pos);
  if (i < 0 || i >= static_cast<long>(jets.size())) return;
  const double d = x - (x0 + static_cast<double>(i) * dx);
  const auto& row = jets[static_cast<std::size_t>(i)];
  for (std::size_t n = 0; n < out.size(); ++n) {
    // nearest-node Taylor expansion of the n-th derivative
    cplx acc = 0.0;
    for (int m = order; m >= static_cast<int>(n); --m)
      acc = acc * (d / static_cast<double>(m - static_cast<int>(n) + 1)) + row[m];
    out[n] = acc;
  }
}

}  // namespace nodes

}  // namespace fcalc
