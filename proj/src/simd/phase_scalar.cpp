#include "fcalc/simd/phase_kernels.hpp"

#include <cmath>
#include <cstddef>

namespace fcalc::simd::scalar {

void phase_sum(std::span<const double> xs, double xi0, double dxi,
               std::span<const cplx> coef, std::span<cplx> out, bool accumulate) {
  const std::size_t n = coef.size();
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double x = xs[j];
    const double rr = std::cos(x * dxi);
    const double ri = std::sin(x * dxi);
    double acc_re = 0.0, acc_im = 0.0;
    for (std::size_t k0 = 0; k0 < n; k0 += kReseed) {
      const double theta = x * (xi0 + static_cast<double>(k0) * dxi);
      double pr = std::cos(theta), pi = std::sin(theta);
      const std::size_t k1 = std::min(n, k0 + kReseed);
      for (std::size_t k = k0; k < k1; ++k) {
        const double cr = coef[k].real(), ci = coef[k].imag();
        acc_re += cr * pr - ci * pi;
        acc_im += cr * pi + ci * pr;
        const double t = pr * rr - pi * ri;
        pi = pr * ri + pi * rr;
        pr = t;
      }
    }
    if (accumulate)
      out[j] += cplx(acc_re, acc_im);
    else
      out[j] = cplx(acc_re, acc_im);
  }
}

void phase_sum_sym(std::span<const double> xs, double xi0, double dxi,
                   std::span<const cplx> pos, std::span<const cplx> neg,
                   std::span<cplx> out, bool accumulate) {
  const std::size_t n = pos.size();
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double x = xs[j];
    const double rr = std::cos(x * dxi);
    const double ri = std::sin(x * dxi);
    double acc_re = 0.0, acc_im = 0.0;
    for (std::size_t k0 = 0; k0 < n; k0 += kReseed) {
      const double theta = x * (xi0 + static_cast<double>(k0) * dxi);
      double pr = std::cos(theta), pi = std::sin(theta);
      const std::size_t k1 = std::min(n, k0 + kReseed);
      for (std::size_t k = k0; k < k1; ++k) {
        // pos * p + neg * conj(p)
        const double sr = pos[k].real() + neg[k].real(), si = pos[k].imag() + neg[k].imag();
        const double dr = pos[k].real() - neg[k].real(), di = pos[k].imag() - neg[k].imag();
        acc_re += sr * pr - di * pi;
        acc_im += si * pr + dr * pi;
        const double t = pr * rr - pi * ri;
        pi = pr * ri + pi * rr;
        pr = t;
      }
    }
    if (accumulate)
      out[j] += cplx(acc_re, acc_im);
    else
      out[j] = cplx(acc_re, acc_im);
  }
}

void phase_accumulate(std::span<const double> xs, std::span<const cplx> coef,
                      double sign, double xi0, double dxi, std::span<cplx> out) {
  const std::size_t n = out.size();
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double x = sign * xs[j];
    const double cr = coef[j].real(), ci = coef[j].imag();
    const double rr = std::cos(x * dxi);
    const double ri = std::sin(x * dxi);
    for (std::size_t k0 = 0; k0 < n; k0 += kReseed) {
      const double theta = x * (xi0 + static_cast<double>(k0) * dxi);
      double pr = std::cos(theta), pi = std::sin(theta);
      const std::size_t k1 = std::min(n, k0 + kReseed);
      for (std::size_t k = k0; k < k1; ++k) {
        out[k] += cplx(cr * pr - ci * pi, cr * pi + ci * pr);
        const double t = pr * rr - pi * ri;
        pi = pr * ri + pi * rr;
        pr = t;
      }
    }
  }
}

}  // namespace fcalc::simd::scalar
