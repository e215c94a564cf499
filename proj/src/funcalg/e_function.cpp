#include "fcalc/funcalg/e_function.hpp"

#include <algorithm>
#include <cmath>

namespace fcalc {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / i;
  return r;
}

bool same_point(cplx a, cplx b) {
  return std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(a));
}

// c1 (z1-x)^{-a} * c2 (z2-x)^{-b} as a list of single poles.
void pole_product(const PoleTerm& p, const PoleTerm& q, std::vector<PoleTerm>& out) {
  const cplx c = p.coeff * q.coeff;
  if (same_point(p.zeta, q.zeta)) {
    out.push_back({c, p.zeta, p.order + q.order});
    return;
  }
  const int a = p.order, b = q.order;
  const cplx d = q.zeta - p.zeta;
  const cplx dinv = 1.0 / d;
  for (int j = 0; j < a; ++j) {
    const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
    out.push_back({c * binom(b + j - 1, j) * sgn * std::pow(dinv, b + j), p.zeta, a - j});
  }
  const double sa = (a % 2 == 0) ? 1.0 : -1.0;
  for (int j = 0; j < b; ++j)
    out.push_back({c * binom(a + j - 1, j) * sa * std::pow(dinv, a + j), q.zeta, b - j});
}

SmoothFunction pole_times(const PoleTerm& p, const SmoothFunction& g) {
  if (g.is_zero()) return {};
  return scale(p.coeff, multiply(SmoothFunction::pole(p.zeta, p.order), g));
}

}  // namespace

EFunction::EFunction(cplx a0, std::vector<PoleTerm> poles, SmoothFunction compact)
    : a0_(a0), poles_(std::move(poles)), compact_(std::move(compact)) {
  for (const auto& p : poles_) {
    if (p.zeta.imag() == 0.0) throw DomainError("pole on the real axis");
    if (p.order < 1) throw DomainError("pole order must be >= 1");
  }
  if (!compact_.is_zero() && !compact_.support().bounded())
    throw DomainError("compact part must have bounded support");
  normalize();
}

EFunction EFunction::constant(cplx a0) { return EFunction(a0, {}); }

EFunction EFunction::omega(cplx z) { return EFunction(0.0, {{1.0, z, 1}}); }

EFunction EFunction::compact(SmoothFunction f) { return EFunction(0.0, {}, std::move(f)); }

void EFunction::normalize() {
  std::vector<PoleTerm> merged;
  for (const auto& p : poles_) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const PoleTerm& q) {
      return q.order == p.order && same_point(q.zeta, p.zeta);
    });
    if (it != merged.end())
      it->coeff += p.coeff;
    else
      merged.push_back(p);
  }
  std::erase_if(merged, [](const PoleTerm& p) { return p.coeff == cplx(0.0); });
  std::sort(merged.begin(), merged.end(), [](const PoleTerm& a, const PoleTerm& b) {
    if (a.zeta.imag() != b.zeta.imag()) return a.zeta.imag() < b.zeta.imag();
    if (a.zeta.real() != b.zeta.real()) return a.zeta.real() < b.zeta.real();
    return a.order < b.order;
  });
  poles_ = std::move(merged);
}

cplx EFunction::operator()(double x) const {
  cplx v = a0_;
  for (const auto& p : poles_) v += p.coeff * std::pow(p.zeta - x, -p.order);
  return v + compact_(x);
}

void EFunction::jet(double x, std::span<cplx> out) const {
  compact_.jet(x, out);
  if (!out.empty()) out[0] += a0_;
  for (const auto& p : poles_) {
    const cplx inv = 1.0 / (p.zeta - x);
    cplx pw = std::pow(inv, p.order);
    double rising = 1.0;
    for (std::size_t n = 0; n < out.size(); ++n) {
      out[n] += p.coeff * rising * pw;
      rising *= static_cast<double>(p.order + static_cast<int>(n));
      pw *= inv;
    }
  }
}

std::vector<cplx> EFunction::asymptotic_coefficients(int n) const {
  std::vector<cplx> a(static_cast<std::size_t>(n) + 1, 0.0);
  a[0] = a0_;
  // c (zeta - x)^{-k} = c (-1)^k x^{-k} sum_j C(k+j-1, j) zeta^j x^{-j}
  for (const auto& p : poles_) {
    const double sk = (p.order % 2 == 0) ? 1.0 : -1.0;
    cplx zp = 1.0;
    for (int j = 0; p.order + j <= n; ++j) {
      a[p.order + j] += p.coeff * sk * binom(p.order + j - 1, j) * zp;
      zp *= p.zeta;
    }
  }
  return a;
}

bool EFunction::is_real_on_line(double tol) const {
  if (std::abs(a0_.imag()) > tol * std::max(1.0, std::abs(a0_))) return false;
  for (const auto& p : poles_) {
    const bool paired = std::any_of(poles_.begin(), poles_.end(), [&](const PoleTerm& q) {
      return q.order == p.order && same_point(q.zeta, std::conj(p.zeta)) &&
             std::abs(q.coeff - std::conj(p.coeff)) <= tol * std::max(1.0, std::abs(p.coeff));
    });
    if (!paired) return false;
  }
  if (compact_.is_zero()) return true;
  const auto h = compact_.support().hull();
  for (int i = 0; i <= 256; ++i) {
    const cplx v = compact_(h.lo + (h.hi - h.lo) * i / 256.0);
    if (std::abs(v.imag()) > tol * std::max(1.0, std::abs(v))) return false;
  }
  return true;
}

double EFunction::tail_bound(double radius) const {
  double b = 0.0;
  for (const auto& p : poles_) {
    const double gap = radius - std::abs(p.zeta);
    if (gap <= 0.0) return kInf;
    b += std::abs(p.coeff) * std::pow(gap, -p.order);
  }
  return b;
}

EFunction multiply_E(const EFunction& f, const EFunction& g) {
  std::vector<PoleTerm> poles;
  for (const auto& p : g.poles()) poles.push_back({f.a0() * p.coeff, p.zeta, p.order});
  for (const auto& p : f.poles()) poles.push_back({g.a0() * p.coeff, p.zeta, p.order});
  for (const auto& p : f.poles())
    for (const auto& q : g.poles()) pole_product(p, q, poles);

  SmoothFunction compact = scale(f.a0(), g.compact_part()) + scale(g.a0(), f.compact_part());
  for (const auto& p : f.poles()) compact = compact + pole_times(p, g.compact_part());
  for (const auto& q : g.poles()) compact = compact + pole_times(q, f.compact_part());
  compact = compact + multiply(f.compact_part(), g.compact_part());
  return EFunction(f.a0() * g.a0(), std::move(poles), std::move(compact));
}

EFunction add_E(const EFunction& f, const EFunction& g) {
  auto poles = f.poles();
  poles.insert(poles.end(), g.poles().begin(), g.poles().end());
  return EFunction(f.a0() + g.a0(), std::move(poles), f.compact_part() + g.compact_part());
}

EFunction scale_E(cplx c, const EFunction& f) {
  auto poles = f.poles();
  for (auto& p : poles) p.coeff *= c;
  return EFunction(c * f.a0(), std::move(poles), scale(c, f.compact_part()));
}

}  // namespace fcalc
