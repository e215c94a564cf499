#include "fcalc/funcalg/tensor_function.hpp"

#include <algorithm>
#include <cmath>

namespace fcalc {

TensorFunction::TensorFunction(std::vector<TensorTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) return;
  arity_ = static_cast<int>(terms_.front().factors.size());
  if (arity_ < 1) throw DomainError("tensor term needs at least one factor");
  for (const auto& t : terms_)
    if (static_cast<int>(t.factors.size()) != arity_)
      throw DomainError("tensor terms disagree on arity");
}

cplx TensorFunction::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != arity_) throw DomainError("tensor arity mismatch");
  cplx s = 0.0;
  for (const auto& t : terms_) {
    cplx p = t.weight;
    for (int j = 0; j < arity_; ++j) p *= t.factors[j](x[j]);
    s += p;
  }
  return s;
}

TensorFunction TensorFunction::operator+(const TensorFunction& other) const {
  if (terms_.empty()) return other;
  if (other.terms_.empty()) return *this;
  auto all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  return TensorFunction(std::move(all));
}

TensorFunction TensorFunction::scaled(cplx c) const {
  auto t = terms_;
  for (auto& term : t) term.weight *= c;
  return TensorFunction(std::move(t));
}

TensorFunction TensorFunction::operator*(const TensorFunction& other) const {
  if (arity_ != other.arity_) throw DomainError("tensor arity mismatch");
  std::vector<TensorTerm> out;
  for (const auto& a : terms_)
    for (const auto& b : other.terms_) {
      TensorTerm t;
      t.weight = a.weight * b.weight;
      for (int j = 0; j < arity_; ++j) t.factors.push_back(multiply(a.factors[j], b.factors[j]));
      out.push_back(std::move(t));
    }
  return TensorFunction(std::move(out));
}

SmoothFunction TensorFunction::diagonal() const {
  SmoothFunction s;
  for (const auto& t : terms_) {
    SmoothFunction p = t.factors.front();
    for (int j = 1; j < arity_; ++j) p = multiply(p, t.factors[j]);
    s = add(s, scale(t.weight, p));
  }
  return s;
}

std::vector<std::vector<Interval>> TensorFunction::support_boxes() const {
  std::vector<std::vector<Interval>> boxes;
  for (const auto& t : terms_) {
    std::vector<Interval> box;
    for (const auto& f : t.factors) box.push_back(f.support().hull());
    boxes.push_back(std::move(box));
  }
  return boxes;
}

TensorFunction tensorize(std::vector<SmoothFunction> factors) {
  if (factors.empty()) throw DomainError("tensorize needs m >= 1");
  return TensorFunction({TensorTerm{1.0, std::move(factors)}});
}

SmoothFunction compose_smooth(const SmoothFunction& g, const EFunction& f, int order,
                              int cells) {
  if (!f.is_real_on_line(1e-10)) throw DomainError("compose_smooth: f is not real on the line");
  if (g.is_zero()) return {};
  const IntervalSet gs = g.support();
  if (!gs.bounded()) throw DomainError("compose_smooth: g needs bounded support");
  if (g.max_order() < order) throw DomainError("compose_smooth: g lacks derivatives");
  const double a0 = f.a0().real();
  const double gap = gs.distance(a0);
  if (!(gap > 0.0))
    throw DomainError("compose_smooth: g does not vanish near the value of f at infinity");

  // Outside [-R, R] the tail |f - a0| < gap/2, so g(f(x)) = 0 there.
  double R = 1.0;
  for (const auto& p : f.poles()) R = std::max(R, std::abs(p.zeta) + 1.0);
  if (!f.compact_part().is_zero()) {
    const auto h = f.compact_part().support().hull();
    R = std::max({R, std::abs(h.lo), std::abs(h.hi)});
  }
  while (f.tail_bound(R) >= 0.5 * gap) R *= 2.0;

  // Scan for {x : f(x) near supp g}; the margin covers variation between samples.
  const int scan = 1 << 15;
  const double step = 2.0 * R / scan;
  double lo = kInf, hi = -kInf;
  std::vector<cplx> fj(2);
  for (int i = 0; i <= scan; ++i) {
    const double x = -R + step * i;
    f.jet(x, fj);
    const double margin = 2.0 * std::abs(fj[1]) * step + 1e-12;
    if (gs.distance(fj[0].real()) <= margin) {
      lo = std::min(lo, x - step);
      hi = std::max(hi, x + step);
    }
  }
  if (!(lo < hi)) return {};

  const double dx = (hi - lo) / cells;
  const std::size_t K = static_cast<std::size_t>(order) + 1;
  std::vector<std::vector<cplx>> jets(static_cast<std::size_t>(cells) + 1,
                                      std::vector<cplx>(K, 0.0));
  std::vector<cplx> fjet(K), gjet(K);
  std::vector<std::vector<double>> B(K, std::vector<double>(K, 0.0));
  for (int i = 0; i <= cells; ++i) {
    const double x = lo + dx * i;
    f.jet(x, fjet);
    g.jet(fjet[0].real(), gjet);
    // Bell polynomials B[n][k] in the derivatives of f
    for (auto& row : B) std::fill(row.begin(), row.end(), 0.0);
    B[0][0] = 1.0;
    for (std::size_t n = 1; n < K; ++n)
      for (std::size_t k = 1; k <= n; ++k) {
        double s = 0.0, c = 1.0;  // c = C(n-1, i-1)
        for (std::size_t m = 1; m + k <= n + 1; ++m) {
          s += c * fjet[m].real() * B[n - m][k - 1];
          c = c * static_cast<double>(n - m) / static_cast<double>(m);
        }
        B[n][k] = s;
      }
    auto& row = jets[static_cast<std::size_t>(i)];
    row[0] = gjet[0];
    for (std::size_t n = 1; n < K; ++n) {
      cplx s = 0.0;
      for (std::size_t k = 1; k <= n; ++k) s += gjet[k] * B[n][k];
      row[n] = s;
    }
  }
  return SmoothFunction::tabulated(lo, dx, order, std::move(jets),
                                   IntervalSet::single(lo - 0.5 * dx, hi + 0.5 * dx));
}

}  // namespace fcalc
