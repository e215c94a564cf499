#include "fcalc/simd/phase_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define FCALC_HAVE_AVX2 1
#endif

namespace fcalc::simd::avx2 {

#ifdef FCALC_HAVE_AVX2

namespace {

constexpr int kGroups = 4;                // independent 4-lane chains per block
constexpr int kBlock = 4 * kGroups;       // x values per block

struct alignas(32) Lanes {
  double v[kBlock];
};

// Cody-Waite reduction by pi/4 and minimax polynomials on [-pi/4, pi/4];
// within 2 ulp of libm for |arg| < 1e8.
inline void sincos_pd(__m256d x, __m256d& s_out, __m256d& c_out) {
  const __m256d sign_bit = _mm256_set1_pd(-0.0);
  const __m256d neg = _mm256_and_pd(x, sign_bit);
  const __m256d ax = _mm256_andnot_pd(sign_bit, x);
  __m256d y = _mm256_floor_pd(_mm256_mul_pd(ax, _mm256_set1_pd(1.27323954473516268615)));
  // round the octant up to even
  const __m256d half_y = _mm256_mul_pd(y, _mm256_set1_pd(0.5));
  const __m256d odd = _mm256_cmp_pd(_mm256_floor_pd(half_y), half_y, _CMP_NEQ_OQ);
  y = _mm256_add_pd(y, _mm256_and_pd(odd, _mm256_set1_pd(1.0)));
  __m256d z = _mm256_fnmadd_pd(y, _mm256_set1_pd(7.85398125648498535156E-1), ax);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(3.77489470793079817668E-8), z);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(2.69515142907905952645E-15), z);
  const __m256d zz = _mm256_mul_pd(z, z);

  __m256d ps = _mm256_set1_pd(1.58962301576546568060E-10);
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-2.50507477628578072866E-8));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(2.75573136213857245213E-6));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-1.98412698295895385996E-4));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(8.33333333332211858878E-3));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-1.66666666666666307295E-1));
  const __m256d sp = _mm256_fmadd_pd(_mm256_mul_pd(z, zz), ps, z);

  __m256d pc = _mm256_set1_pd(-1.13585365213876817300E-11);
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(2.08757008419747316778E-9));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(-2.75573141792967388112E-7));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(2.48015872888517045348E-5));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(-1.38888888888730564116E-3));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(4.16666666666665929218E-2));
  const __m256d cp = _mm256_fmadd_pd(_mm256_mul_pd(zz, zz), pc,
                                     _mm256_fnmadd_pd(zz, _mm256_set1_pd(0.5), _mm256_set1_pd(1.0)));

  // quadrant q = (y / 2) mod 4
  const __m256d qd = _mm256_mul_pd(y, _mm256_set1_pd(0.5));
  const __m256d q = _mm256_fnmadd_pd(_mm256_floor_pd(_mm256_mul_pd(qd, _mm256_set1_pd(0.25))),
                                     _mm256_set1_pd(4.0), qd);
  const __m256d swap = _mm256_or_pd(_mm256_cmp_pd(q, _mm256_set1_pd(1.0), _CMP_EQ_OQ),
                                    _mm256_cmp_pd(q, _mm256_set1_pd(3.0), _CMP_EQ_OQ));
  const __m256d s_neg = _mm256_and_pd(_mm256_cmp_pd(q, _mm256_set1_pd(1.5), _CMP_GT_OQ), sign_bit);
  const __m256d c_neg = _mm256_and_pd(_mm256_or_pd(_mm256_cmp_pd(q, _mm256_set1_pd(1.0), _CMP_EQ_OQ),
                                                   _mm256_cmp_pd(q, _mm256_set1_pd(2.0), _CMP_EQ_OQ)),
                                      sign_bit);
  const __m256d sv = _mm256_blendv_pd(sp, cp, swap);
  const __m256d cv = _mm256_blendv_pd(cp, sp, swap);
  s_out = _mm256_xor_pd(_mm256_xor_pd(sv, s_neg), neg);
  c_out = _mm256_xor_pd(cv, c_neg);
}

}  // namespace

bool compiled() { return true; }

void phase_sum(std::span<const double> xs, double xi0, double dxi,
               std::span<const cplx> coef, std::span<cplx> out, bool accumulate) {
  const std::size_t n = coef.size();
  const std::size_t m = xs.size();
  const double* cptr = reinterpret_cast<const double*>(coef.data());

  Lanes xb;
  for (std::size_t j0 = 0; j0 < m; j0 += kBlock) {
    const std::size_t cnt = std::min<std::size_t>(kBlock, m - j0);
    for (int l = 0; l < kBlock; ++l)
      xb.v[l] = static_cast<std::size_t>(l) < cnt ? xs[j0 + l] : 0.0;

    __m256d xv[kGroups], rr[kGroups], ri[kGroups], are[kGroups], aim[kGroups];
    for (int g = 0; g < kGroups; ++g) {
      xv[g] = _mm256_load_pd(xb.v + 4 * g);
      sincos_pd(_mm256_mul_pd(xv[g], _mm256_set1_pd(dxi)), ri[g], rr[g]);
      are[g] = _mm256_setzero_pd();
      aim[g] = _mm256_setzero_pd();
    }

    for (std::size_t k0 = 0; k0 < n; k0 += kReseed) {
      const __m256d xi = _mm256_set1_pd(xi0 + static_cast<double>(k0) * dxi);
      __m256d pr[kGroups], pim[kGroups];
      for (int g = 0; g < kGroups; ++g) sincos_pd(_mm256_mul_pd(xv[g], xi), pim[g], pr[g]);
      const std::size_t k1 = std::min(n, k0 + kReseed);
      for (std::size_t k = k0; k < k1; ++k) {
        const __m256d cr = _mm256_broadcast_sd(cptr + 2 * k);
        const __m256d ci = _mm256_broadcast_sd(cptr + 2 * k + 1);
        for (int g = 0; g < kGroups; ++g) {
          are[g] = _mm256_fmadd_pd(cr, pr[g], _mm256_fnmadd_pd(ci, pim[g], are[g]));
          aim[g] = _mm256_fmadd_pd(cr, pim[g], _mm256_fmadd_pd(ci, pr[g], aim[g]));
          const __m256d t = _mm256_fmsub_pd(pr[g], rr[g], _mm256_mul_pd(pim[g], ri[g]));
          pim[g] = _mm256_fmadd_pd(pr[g], ri[g], _mm256_mul_pd(pim[g], rr[g]));
          pr[g] = t;
        }
      }
    }

    Lanes ore, oim;
    for (int g = 0; g < kGroups; ++g) {
      _mm256_store_pd(ore.v + 4 * g, are[g]);
      _mm256_store_pd(oim.v + 4 * g, aim[g]);
    }
    for (std::size_t l = 0; l < cnt; ++l) {
      const cplx v(ore.v[l], oim.v[l]);
      if (accumulate)
        out[j0 + l] += v;
      else
        out[j0 + l] = v;
    }
  }
}

void phase_sum_sym(std::span<const double> xs, double xi0, double dxi,
                   std::span<const cplx> pos, std::span<const cplx> neg,
                   std::span<cplx> out, bool accumulate) {
  const std::size_t n = pos.size();
  const std::size_t m = xs.size();
  // pos p + neg conj(p) = (pos + neg) re(p) + i (pos - neg) im(p)
  std::vector<double> sum(2 * n), dif(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    sum[2 * k] = pos[k].real() + neg[k].real();
    sum[2 * k + 1] = pos[k].imag() + neg[k].imag();
    dif[2 * k] = pos[k].real() - neg[k].real();
    dif[2 * k + 1] = pos[k].imag() - neg[k].imag();
  }

  Lanes xb;
  for (std::size_t j0 = 0; j0 < m; j0 += kBlock) {
    const std::size_t cnt = std::min<std::size_t>(kBlock, m - j0);
    for (int l = 0; l < kBlock; ++l)
      xb.v[l] = static_cast<std::size_t>(l) < cnt ? xs[j0 + l] : 0.0;
    __m256d xv[kGroups], rr[kGroups], ri[kGroups], are[kGroups], aim[kGroups];
    for (int g = 0; g < kGroups; ++g) {
      xv[g] = _mm256_load_pd(xb.v + 4 * g);
      sincos_pd(_mm256_mul_pd(xv[g], _mm256_set1_pd(dxi)), ri[g], rr[g]);
      are[g] = _mm256_setzero_pd();
      aim[g] = _mm256_setzero_pd();
    }
    for (std::size_t k0 = 0; k0 < n; k0 += kReseed) {
      const __m256d xi = _mm256_set1_pd(xi0 + static_cast<double>(k0) * dxi);
      __m256d pr[kGroups], pim[kGroups];
      for (int g = 0; g < kGroups; ++g) sincos_pd(_mm256_mul_pd(xv[g], xi), pim[g], pr[g]);
      const std::size_t k1 = std::min(n, k0 + kReseed);
      for (std::size_t k = k0; k < k1; ++k) {
        const __m256d sr = _mm256_broadcast_sd(sum.data() + 2 * k);
        const __m256d si = _mm256_broadcast_sd(sum.data() + 2 * k + 1);
        const __m256d dr = _mm256_broadcast_sd(dif.data() + 2 * k);
        const __m256d di = _mm256_broadcast_sd(dif.data() + 2 * k + 1);
        for (int g = 0; g < kGroups; ++g) {
          are[g] = _mm256_fmadd_pd(sr, pr[g], _mm256_fnmadd_pd(di, pim[g], are[g]));
          aim[g] = _mm256_fmadd_pd(si, pr[g], _mm256_fmadd_pd(dr, pim[g], aim[g]));
          const __m256d t = _mm256_fmsub_pd(pr[g], rr[g], _mm256_mul_pd(pim[g], ri[g]));
          pim[g] = _mm256_fmadd_pd(pr[g], ri[g], _mm256_mul_pd(pim[g], rr[g]));
          pr[g] = t;
        }
      }
    }
    Lanes ore, oim;
    for (int g = 0; g < kGroups; ++g) {
      _mm256_store_pd(ore.v + 4 * g, are[g]);
      _mm256_store_pd(oim.v + 4 * g, aim[g]);
    }
    for (std::size_t l = 0; l < cnt; ++l) {
      const cplx v(ore.v[l], oim.v[l]);
      if (accumulate)
        out[j0 + l] += v;
      else
        out[j0 + l] = v;
    }
  }
}

// Lanes run along the output frequency index: four consecutive k per vector,
// four samples x_j per pass so each output vector is loaded and stored once.
void phase_accumulate(std::span<const double> xs, std::span<const cplx> coef,
                      double sign, double xi0, double dxi, std::span<cplx> out) {
  const std::size_t n = out.size();
  if (n == 0 || xs.empty()) return;
  const std::size_t npad = (n + 3) & ~std::size_t{3};
  std::vector<double> ore(npad, 0.0), oim(npad, 0.0);

  const std::size_t m = xs.size();
  constexpr int kSamples = 4;
  for (std::size_t j0 = 0; j0 < m; j0 += kSamples) {
    const std::size_t cnt = std::min<std::size_t>(kSamples, m - j0);
    double xv[kSamples], cr[kSamples], ci[kSamples];
    for (int s = 0; s < kSamples; ++s) {
      const bool live = static_cast<std::size_t>(s) < cnt;
      xv[s] = live ? sign * xs[j0 + s] : 0.0;
      cr[s] = live ? coef[j0 + s].real() : 0.0;
      ci[s] = live ? coef[j0 + s].imag() : 0.0;
    }
    __m256d rr[kSamples], ri[kSamples], vcr[kSamples], vci[kSamples];
    for (int s = 0; s < kSamples; ++s) {
      rr[s] = _mm256_set1_pd(std::cos(4.0 * xv[s] * dxi));
      ri[s] = _mm256_set1_pd(std::sin(4.0 * xv[s] * dxi));
      vcr[s] = _mm256_set1_pd(cr[s]);
      vci[s] = _mm256_set1_pd(ci[s]);
    }

    for (std::size_t k0 = 0; k0 < npad; k0 += kReseed) {
      __m256d pr[kSamples], pim[kSamples];
      for (int s = 0; s < kSamples; ++s) {
        alignas(32) double c4[4], s4[4];
        for (int l = 0; l < 4; ++l) {
          const double th = xv[s] * (xi0 + static_cast<double>(k0 + l) * dxi);
          c4[l] = std::cos(th);
          s4[l] = std::sin(th);
        }
        pr[s] = _mm256_load_pd(c4);
        pim[s] = _mm256_load_pd(s4);
      }
      const std::size_t k1 = std::min(npad, k0 + kReseed);
      for (std::size_t k = k0; k < k1; k += 4) {
        __m256d vr = _mm256_loadu_pd(ore.data() + k);
        __m256d vi = _mm256_loadu_pd(oim.data() + k);
        for (int s = 0; s < kSamples; ++s) {
          vr = _mm256_fmadd_pd(vcr[s], pr[s], _mm256_fnmadd_pd(vci[s], pim[s], vr));
          vi = _mm256_fmadd_pd(vcr[s], pim[s], _mm256_fmadd_pd(vci[s], pr[s], vi));
          const __m256d t = _mm256_fmsub_pd(pr[s], rr[s], _mm256_mul_pd(pim[s], ri[s]));
          pim[s] = _mm256_fmadd_pd(pr[s], ri[s], _mm256_mul_pd(pim[s], rr[s]));
          pr[s] = t;
        }
        _mm256_storeu_pd(ore.data() + k, vr);
        _mm256_storeu_pd(oim.data() + k, vi);
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) out[k] += cplx(ore[k], oim[k]);
}

#else

bool compiled() { return false; }

void phase_sum(std::span<const double> xs, double xi0, double dxi,
               std::span<const cplx> coef, std::span<cplx> out, bool accumulate) {
  scalar::phase_sum(xs, xi0, dxi, coef, out, accumulate);
}

void phase_sum_sym(std::span<const double> xs, double xi0, double dxi,
                   std::span<const cplx> pos, std::span<const cplx> neg,
                   std::span<cplx> out, bool accumulate) {
  scalar::phase_sum_sym(xs, xi0, dxi, pos, neg, out, accumulate);
}

void phase_accumulate(std::span<const double> xs, std::span<const cplx> coef,
                      double sign, double xi0, double dxi, std::span<cplx> out) {
  scalar::phase_accumulate(xs, coef, sign, xi0, dxi, out);
}

#endif

}  // namespace fcalc::simd::avx2
