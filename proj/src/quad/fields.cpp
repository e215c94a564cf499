#include "fcalc/quad/fields.hpp"

#include <algorithm>
#include <cmath>

namespace fcalc::quad {

void WeightField::weight_rows(std::span<const double> xs, std::span<const double> ys,
                              std::span<cplx> out) const {
  for (std::size_t i = 0; i < ys.size(); ++i) weight_row(xs, ys[i], out.subspan(i * xs.size(), xs.size()));
}

void WeightField::weight_row(std::span<const double> xs, double y, std::span<cplx> out) const {
  for (std::size_t j = 0; j < xs.size(); ++j) out[j] = weight(cplx(xs[j], y));
}

Matrix MatrixField::value(cplx z) const {
  Matrix acc = Matrix::Zero(dim(), dim());
  const cplx one(1.0);
  accumulate(std::span<const cplx>(&z, 1), std::span<const cplx>(&one, 1), acc);
  return finalize(acc);
}

namespace {

// G(u, v) = integral over [0,u] x [0,v] of 1/r, u, v >= 0
double corner(double u, double v) {
  if (u <= 0.0 || v <= 0.0) return 0.0;
  return u * std::asinh(v / u) + v * std::asinh(u / v);
}

double signed_corner(double u, double v) {
  const double s = (u < 0.0 ? -1.0 : 1.0) * (v < 0.0 ? -1.0 : 1.0);
  return s * corner(std::abs(u), std::abs(v));
}

}  // namespace

double inverse_distance_integral(cplx c, double x0, double x1, double y0, double y1) {
  const double a = c.real(), b = c.imag();
  return signed_corner(x1 - a, y1 - b) - signed_corner(x0 - a, y1 - b) -
         signed_corner(x1 - a, y0 - b) + signed_corner(x0 - a, y0 - b);
}

ResolventField::ResolventField(const Operator& p) : p_(p) {}

ResolventField::ResolventField(const Operator& p, const GrowthProfile& growth)
    : p_(p), growth_(growth), has_growth_(true) {}

void ResolventField::accumulate(std::span<const cplx> z, std::span<const cplx> w, Matrix& acc) const {
  const Index n = p_.dim();
  const cplx* t = p_.schur_t().data();
  cplx* a = acc.data();
  std::vector<cplx> x(static_cast<std::size_t>(n));
  std::vector<cplx> invd(static_cast<std::size_t>(n));
  for (std::size_t s = 0; s < z.size(); ++s) {
    const cplx wz = w[s];
    if (wz == cplx(0.0)) continue;
    const cplx zz = z[s];
    for (Index i = 0; i < n; ++i) invd[i] = 1.0 / (zz - t[i + i * n]);
    // column j of (zI - T)^{-1} by back substitution
    for (Index j = 0; j < n; ++j) {
      x[j] = invd[j];
      for (Index i = j - 1; i >= 0; --i) {
        cplx sum = 0.0;
        for (Index k = i + 1; k <= j; ++k) sum += t[i + k * n] * x[k];
        // (zI - T)(i,k) = -T(i,k) off the diagonal
        x[i] = sum * invd[i];
      }
      cplx* col = a + j * n;
      for (Index i = 0; i <= j; ++i) col[i] += wz * x[i];
    }
  }
}

double ResolventField::norm_integral_bound(double x0, double x1, double y0, double y1) const {
  double best = WeightField::kInf;
  const double lo = std::min(std::abs(y0), std::abs(y1));
  const double hi = std::max(std::abs(y0), std::abs(y1));
  if (has_growth_ && !(y0 < 0.0 && y1 > 0.0) && lo > 0.0) {
    const double n = growth_.N;
    const double iy = std::abs(n - 1.0) < 1e-12 ? std::log(hi / lo)
                                                : (std::pow(hi, 1.0 - n) - std::pow(lo, 1.0 - n)) / (1.0 - n);
    best = growth_.C * (x1 - x0) * iy;
  }
  const double kappa = p_.eigvec_condition();
  if (std::isfinite(kappa)) {
    double s = 0.0;
    const Vector& ev = p_.eigenvector_values();
    for (Index i = 0; i < ev.size(); ++i) s += inverse_distance_integral(ev(i), x0, x1, y0, y1);
    // for a normal operator the norm is the largest term, not the sum
    best = std::min(best, kappa * s);
  }
  return best;
}

void CauchyKernelField::accumulate(std::span<const cplx> z, std::span<const cplx> w, Matrix& acc) const {
  cplx s = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) s += w[j] / (z[j] - c_);
  acc(0, 0) += s;
}

double CauchyKernelField::norm_integral_bound(double x0, double x1, double y0, double y1) const {
  return inverse_distance_integral(c_, x0, x1, y0, y1);
}

void IdentityField::accumulate(std::span<const cplx>, std::span<const cplx> w, Matrix& acc) const {
  cplx s = 0.0;
  for (const cplx v : w) s += v;
  for (Index i = 0; i < n_; ++i) acc(i, i) += s;
}

}  // namespace fcalc::quad
