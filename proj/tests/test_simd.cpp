#include "fcalc/simd/phase_kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using fcalc::simd::cplx;
namespace simd = fcalc::simd;

namespace {

// Direct evaluation with one exp per term.
std::vector<cplx> direct_sum(const std::vector<double>& xs, double xi0, double dxi,
                             const std::vector<cplx>& coef) {
  std::vector<cplx> out(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < coef.size(); ++k)
      s += coef[k] * std::polar(1.0, xs[j] * (xi0 + static_cast<double>(k) * dxi));
    out[j] = s;
  }
  return out;
}

std::vector<cplx> direct_accumulate(const std::vector<double>& xs, const std::vector<cplx>& coef,
                                    double sign, double xi0, double dxi, std::size_t n) {
  std::vector<cplx> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < xs.size(); ++j)
      out[k] += coef[j] * std::polar(1.0, sign * xs[j] * (xi0 + static_cast<double>(k) * dxi));
  return out;
}

double max_rel(const std::vector<cplx>& a, const std::vector<cplx>& b, double scale) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m / scale;
}

struct Case {
  std::vector<double> xs;
  std::vector<cplx> coef;
  double xi0, dxi;
  double l1;
};

Case make_case(std::mt19937_64& rng, std::size_t nx, std::size_t nk) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Case c;
  c.dxi = 0.37;
  c.xi0 = -0.5 * c.dxi * static_cast<double>(nk);
  for (std::size_t j = 0; j < nx; ++j) c.xs.push_back(3.0 * u(rng));
  c.l1 = 0.0;
  for (std::size_t k = 0; k < nk; ++k) {
    c.coef.emplace_back(u(rng), u(rng));
    c.l1 += std::abs(c.coef.back());
  }
  return c;
}

}  // namespace

TEST_CASE("scalar phase_sum matches direct exponentials") {
  std::mt19937_64 rng(1);
  for (std::size_t nk : {1u, 7u, 64u, 65u, 300u, 1000u}) {
    auto c = make_case(rng, 37, nk);
    std::vector<cplx> out(c.xs.size());
    simd::scalar::phase_sum(c.xs, c.xi0, c.dxi, c.coef, out, false);
    CHECK(max_rel(out, direct_sum(c.xs, c.xi0, c.dxi, c.coef), c.l1) < 1e-13);
  }
}

TEST_CASE("avx2 phase_sum agrees with scalar and direct") {
  if (!simd::cpu_has_avx2()) {
    MESSAGE("avx2 unavailable; skipping vector comparison");
    return;
  }
  std::mt19937_64 rng(2);
  for (std::size_t nx : {1u, 5u, 16u, 33u, 100u})
    for (std::size_t nk : {1u, 63u, 64u, 129u, 777u}) {
      auto c = make_case(rng, nx, nk);
      std::vector<cplx> a(nx), b(nx, cplx(1.0, 2.0)), base(nx, cplx(1.0, 2.0));
      simd::scalar::phase_sum(c.xs, c.xi0, c.dxi, c.coef, a, false);
      simd::avx2::phase_sum(c.xs, c.xi0, c.dxi, c.coef, b, true);
      for (std::size_t i = 0; i < nx; ++i) b[i] -= base[i];
      CHECK(max_rel(a, b, c.l1) < 1e-13);
      CHECK(max_rel(b, direct_sum(c.xs, c.xi0, c.dxi, c.coef), c.l1) < 1e-13);
    }
}

TEST_CASE("phase_accumulate variants agree with direct sums") {
  std::mt19937_64 rng(3);
  for (std::size_t nx : {1u, 3u, 4u, 9u, 50u})
    for (std::size_t nk : {1u, 5u, 64u, 130u, 513u}) {
      auto c = make_case(rng, nx, nx);
      const auto ref = direct_accumulate(c.xs, c.coef, -1.0, c.xi0, c.dxi, nk);
      std::vector<cplx> s(nk, 0.0);
      simd::scalar::phase_accumulate(c.xs, c.coef, -1.0, c.xi0, c.dxi, s);
      CHECK(max_rel(s, ref, c.l1) < 1e-13);
      if (simd::cpu_has_avx2()) {
        std::vector<cplx> v(nk, 0.0);
        simd::avx2::phase_accumulate(c.xs, c.coef, -1.0, c.xi0, c.dxi, v);
        CHECK(max_rel(v, ref, c.l1) < 1e-13);
      }
    }
}

TEST_CASE("phase_sum_sym variants agree with the mirrored direct sum") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t nx : {1u, 4u, 13u, 64u})
    for (std::size_t nk : {1u, 3u, 16u, 65u, 400u}) {
      auto c = make_case(rng, nx, nk);
      c.xi0 = 0.0;
      std::vector<cplx> neg;
      for (std::size_t k = 0; k < nk; ++k) {
        neg.emplace_back(u(rng), u(rng));
        c.l1 += std::abs(neg.back());
      }
      std::vector<double> mx(c.xs.size());
      for (std::size_t j = 0; j < mx.size(); ++j) mx[j] = -c.xs[j];
      auto ref = direct_sum(c.xs, 0.0, c.dxi, c.coef);
      const auto mirrored = direct_sum(mx, 0.0, c.dxi, neg);
      for (std::size_t j = 0; j < nx; ++j) ref[j] += mirrored[j];

      std::vector<cplx> s(nx);
      simd::scalar::phase_sum_sym(c.xs, 0.0, c.dxi, c.coef, neg, s, false);
      CHECK(max_rel(s, ref, c.l1) < 1e-13);
      if (simd::cpu_has_avx2()) {
        std::vector<cplx> v(nx, cplx(-3.0, 0.5));
        simd::avx2::phase_sum_sym(c.xs, 0.0, c.dxi, c.coef, neg, v, true);
        for (std::size_t j = 0; j < nx; ++j) v[j] -= cplx(-3.0, 0.5);
        CHECK(max_rel(v, ref, c.l1) < 1e-13);
        CHECK(max_rel(v, s, c.l1) < 1e-13);
      }
    }
}

// The vector kernels reduce their own arguments; large phases stress the reduction.
TEST_CASE("avx2 kernels stay accurate at large phases") {
  if (!simd::cpu_has_avx2()) return;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double span : {10.0, 1e3, 3e4}) {
    Case c;
    c.dxi = 1.7;
    c.xi0 = 4000.0;
    c.l1 = 0.0;
    for (int j = 0; j < 40; ++j) c.xs.push_back(span * u(rng));
    for (int k = 0; k < 70; ++k) {
      c.coef.emplace_back(u(rng), u(rng));
      c.l1 += std::abs(c.coef.back());
    }
    std::vector<cplx> v(c.xs.size());
    simd::avx2::phase_sum(c.xs, c.xi0, c.dxi, c.coef, v, false);
    // |x xi| reaches ~1e8; exact sin/cos there are good to about 1e-8 relative of the phase
    CHECK(max_rel(v, direct_sum(c.xs, c.xi0, c.dxi, c.coef), c.l1) < 1e-15 * span * c.xi0 * 10.0);
  }
}

TEST_CASE("dispatch override switches tables") {
  const auto prev = simd::set_isa(simd::Isa::scalar);
  CHECK(simd::kernels().isa == simd::Isa::scalar);
  CHECK(simd::kernels().name == "scalar");
  if (simd::cpu_has_avx2()) {
    simd::set_isa(simd::Isa::avx2);
    CHECK(simd::kernels().isa == simd::Isa::avx2);
  }
  simd::set_isa(prev);
}

TEST_CASE("empty inputs are no-ops") {
  std::vector<double> xs;
  std::vector<cplx> coef, out;
  simd::kernels().phase_sum(xs, 0.0, 1.0, coef, out, false);
  std::vector<cplx> acc(4, cplx(1.0));
  simd::kernels().phase_accumulate(xs, coef, 1.0, 0.0, 1.0, acc);
  CHECK(acc[0] == cplx(1.0));
}
