#include "fcalc/funcalg/e_function.hpp"
#include "fcalc/funcalg/json_io.hpp"
#include "fcalc/funcalg/mollifier.hpp"
#include "fcalc/funcalg/smooth_function.hpp"
#include "fcalc/funcalg/tensor_function.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fcalc;

namespace {

std::vector<SmoothFunction> sample_tree_family() {
  const auto b = SmoothFunction::bump(0.2, 0.9);
  const auto p = SmoothFunction::plateau(-0.3, 0.4, 0.6);
  const auto poly = SmoothFunction::polynomial(0.1, {1.0, cplx(0.5, -0.2), -0.3, 0.25});
  const auto pole = SmoothFunction::pole(cplx(0.3, 0.7), 2);
  return {b,
          p,
          poly * b,
          pole * p,
          b + scale(cplx(0.0, 2.0), p),
          shift(b * p, 0.15),
          SmoothFunction::bump(-1.0, 1.5) * SmoothFunction::bump(0.0, 1.2)};
}

// Ridders extrapolation of central differences; the returned value is the
// tableau entry with the smallest estimated error.
template <class F>
cplx ridders(F&& fn, double x, double h) {
  constexpr int kMax = 12;
  cplx a[kMax][kMax];
  a[0][0] = (fn(x + h) - fn(x - h)) / (2.0 * h);
  cplx best = a[0][0];
  double err = 1e300;
  for (int i = 1; i < kMax; ++i) {
    h /= 1.4;
    a[0][i] = (fn(x + h) - fn(x - h)) / (2.0 * h);
    double fac = 1.96;
    for (int j = 1; j <= i; ++j) {
      a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
      fac *= 1.96;
      const double e = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
      if (e <= err) {
        err = e;
        best = a[j][i];
      }
    }
    if (std::abs(a[i][i] - a[i - 1][i - 1]) >= 2.0 * err) break;
  }
  return best;
}

}  // namespace

TEST_CASE("elementary evaluations") {
  const auto b = SmoothFunction::bump(0.0, 1.0);
  CHECK(b.eval(0.0).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(b.eval(1.5, 3) == cplx(0.0));
  CHECK(SmoothFunction::plateau(0.0, 1.0, 0.5).eval(0.5, 1) == cplx(0.0));
  CHECK(SmoothFunction::plateau(0.0, 1.0, 0.5).eval(0.5) == cplx(1.0));
  CHECK(SmoothFunction::plateau(0.0, 1.0, 0.5).eval(-0.5) == cplx(0.0));
  CHECK(multiply(b, b).eval(0.0).real() == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("plateau and step profile") {
  CHECK(mollifier::step(0.5) == doctest::Approx(0.5));
  const auto p = SmoothFunction::plateau(0.0, 1.0, 0.25);
  CHECK(p.eval(-0.125).real() == doctest::Approx(0.5));
  CHECK(p.eval(1.125).real() == doctest::Approx(0.5));
  for (double t = 0.01; t < 1.0; t += 0.01) {
    CHECK(mollifier::chi(t) == doctest::Approx(mollifier::chi(-t)));
    CHECK(mollifier::chi(t) >= 0.0);
    CHECK(mollifier::chi(t) <= 1.0);
  }
  CHECK(mollifier::chi(0.5) == 1.0);
  CHECK(mollifier::chi(1.0) == 0.0);
}

TEST_CASE("products with zero and disjoint supports vanish") {
  const auto b = SmoothFunction::bump(0.0, 1.0);
  CHECK(multiply(b, SmoothFunction::zero()).is_zero());
  const auto pq = multiply(SmoothFunction::plateau(0, 1, 0.1), SmoothFunction::plateau(2, 3, 0.1));
  CHECK(pq.is_zero());
  CHECK(pq.eval(1.5) == cplx(0.0));
}

TEST_CASE("support is computed from the tree") {
  const auto f = SmoothFunction::bump(0.0, 1.0) * SmoothFunction::plateau(0.5, 2.0, 0.2) +
                 SmoothFunction::bump(5.0, 0.5);
  const auto s = f.support();
  REQUIRE(s.parts().size() == 2);
  CHECK(s.parts()[0].lo == doctest::Approx(0.3));
  CHECK(s.parts()[0].hi == doctest::Approx(1.0));
  CHECK(s.parts()[1].lo == doctest::Approx(4.5));
  CHECK(s.bounded());
}

TEST_CASE("derivatives agree with central differences up to order 6") {
  std::mt19937_64 rng(11);
  for (const auto& f : sample_tree_family()) {
    const auto s = f.support().hull();
    std::uniform_real_distribution<double> u(s.lo, s.hi);
    for (int k = 1; k <= 6; ++k)
      for (int i = 0; i < 20; ++i) {
        const double x = u(rng);
        const cplx fd = ridders([&](double t) { return f.eval(t, k - 1); }, x, 3e-4 * (s.hi - s.lo));
        const cplx ex = f.eval(x, k);
        const double scale = std::max(std::abs(ex), 1e-3 * f.sup_norm(k, 400));
        CHECK_MESSAGE(std::abs(fd - ex) <= 1e-5 * scale, f.kind() << " k=" << k << " x=" << x << " ex=" << ex << " fd=" << fd);
      }
  }
}

TEST_CASE("tabulated nodes enforce their order") {
  const auto b = SmoothFunction::bump(0.0, 1.0);
  std::vector<std::vector<cplx>> jets;
  for (int i = 0; i <= 64; ++i) jets.push_back(b.jet(-1.0 + i / 32.0, 3));
  const auto t = SmoothFunction::tabulated(-1.0, 1.0 / 32.0, 3, jets, b.support());
  CHECK(std::abs(t.eval(0.013) - b.eval(0.013)) < 1e-6);
  CHECK(t.max_order() == 3);
  CHECK_THROWS_AS(t.eval(0.0, 4), DomainError);
}

TEST_CASE("pole products via partial fractions") {
  const auto wi = EFunction::omega(cplx(0, 1));
  const auto w2i = EFunction::omega(cplx(0, 2));
  const auto prod = multiply_E(wi, w2i);
  REQUIRE(prod.poles().size() == 2);
  // 1/((i-x)(2i-x)) = -i/(i-x) + i/(2i-x)
  for (const auto& p : prod.poles()) {
    if (std::abs(p.zeta - cplx(0, 1)) < 1e-15) {
      CHECK(std::abs(p.coeff - cplx(0, -1)) < 1e-14);
    } else {
      CHECK(std::abs(p.zeta - cplx(0, 2)) < 1e-15);
      CHECK(std::abs(p.coeff - cplx(0, 1)) < 1e-14);
    }
  }
  CHECK(std::abs(prod(0.0) - cplx(-0.5, 0.0)) < 1e-15);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 10; ++i) {
    const double x = u(rng);
    CHECK(std::abs(prod(x) - wi(x) * w2i(x)) < 1e-14);
  }

  const auto sq = multiply_E(wi, wi);
  REQUIRE(sq.poles().size() == 1);
  CHECK(sq.poles()[0].order == 2);
  CHECK(sq.poles()[0].coeff == cplx(1.0));

  const auto g = EFunction(cplx(0.5, 0.1), {{cplx(2, 1), cplx(1, -1), 2}}, SmoothFunction::bump(0, 1));
  const auto id = multiply_E(EFunction::constant(1.0), g);
  for (double x : {-3.0, -0.2, 0.4, 7.0}) CHECK(std::abs(id(x) - g(x)) < 1e-15);
}

TEST_CASE("higher-order partial fractions reproduce products") {
  const EFunction f(0.0, {{cplx(1, 0.5), cplx(0.3, 1.2), 3}});
  const EFunction g(0.0, {{cplx(-0.7, 0.2), cplx(-1.0, -0.8), 2}, {cplx(0.4), cplx(0.3, 1.2), 1}});
  const auto h = multiply_E(f, g);
  for (double x = -4.0; x <= 4.0; x += 0.37)
    CHECK(std::abs(h(x) - f(x) * g(x)) < 1e-12 * std::max(1.0, std::abs(f(x) * g(x))));
}

TEST_CASE("E-products are associative and commutative") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_e = [&] {
    std::vector<PoleTerm> poles;
    for (int k = 0; k < 3; ++k) {
      double im = u(rng);
      if (std::abs(im) < 0.3) im = im < 0 ? -0.5 : 0.5;
      poles.push_back({cplx(u(rng), u(rng)), cplx(2 * u(rng), im), 1 + (k % 2)});
    }
    return EFunction(cplx(u(rng), u(rng)), poles, scale(u(rng), SmoothFunction::bump(u(rng), 1.0)));
  };
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_e(), b = random_e(), c = random_e();
    const auto ab_c = multiply_E(multiply_E(a, b), c);
    const auto a_bc = multiply_E(a, multiply_E(b, c));
    const auto ba = multiply_E(b, a);
    const auto ab = multiply_E(a, b);
    for (int i = 0; i < 10; ++i) {
      const double x = 4.0 * u(rng);
      const double s = std::max(1.0, std::abs(a(x) * b(x) * c(x)));
      CHECK(std::abs(ab_c(x) - a_bc(x)) <= 1e-12 * s);
      CHECK(std::abs(ab(x) - ba(x)) <= 1e-12 * s);
      CHECK(std::abs(ab_c(x) - a(x) * b(x) * c(x)) <= 1e-12 * s);
    }
  }
}

TEST_CASE("asymptotic coefficients control the tail") {
  const EFunction f(cplx(0.3), {{cplx(1, 0.5), cplx(0.3, 1.2), 1}, {cplx(-0.2, 0.1), cplx(-1, -0.5), 2}},
                    SmoothFunction::bump(0.0, 1.0));
  for (int N = 0; N <= 3; ++N) {
    const auto a = f.asymptotic_coefficients(N);
    double cmax = 0.0;
    for (double ax = 10.0; ax <= 1000.0; ax *= 1.1)
      for (double sgn : {-1.0, 1.0}) {
        const double x = sgn * ax;
        cplx s = 0.0;
        for (int k = 0; k <= N; ++k) s += a[k] * std::pow(x, -k);
        cmax = std::max(cmax, std::abs(f(x) - s) * std::pow(ax, N + 1));
      }
    // constant bounded by the next coefficient magnitude with slack
    const auto an = f.asymptotic_coefficients(N + 1);
    CHECK(cmax <= 2.0 * std::abs(an[N + 1]) + 1.0);
  }
}

TEST_CASE("composition tabulates g o f with compact support") {
  // f = omega_i + omega_{-i} = -2x/(1+x^2), real, tends to 0 at infinity
  const EFunction f(0.0, {{1.0, cplx(0, 1), 1}, {1.0, cplx(0, -1), 1}});
  REQUIRE(f.is_real_on_line());
  const auto g = SmoothFunction::bump(0.6, 0.4);
  const auto h = compose_smooth(g, f);
  REQUIRE(h.support().bounded());
  const auto s = h.support().hull();
  CHECK(s.lo > -10.0);
  CHECK(s.hi < 10.0);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(s.lo, s.hi);
  for (int i = 0; i < 5; ++i) {
    const double x = u(rng);
    const double step = 1e-4;
    const cplx fd = (h(x + step) - h(x - step)) / (2 * step);
    std::vector<cplx> fj(2);
    f.jet(x, fj);
    const cplx chain = g.eval(fj[0].real(), 1) * fj[1];
    CHECK(std::abs(h.eval(x, 1) - chain) <= 1e-6 * std::max(1.0, std::abs(chain)));
    CHECK(std::abs(fd - h.eval(x, 1)) <= 1e-6 * std::max(1.0, std::abs(chain)));
    CHECK(std::abs(h(x) - g(f(x).real())) < 1e-10);
  }
  // plateau value at a point where f = 1 exactly: f(-1) = 1
  const auto pl = compose_smooth(SmoothFunction::plateau(0.9, 1.1, 0.05), f);
  CHECK(std::abs(pl(-1.0) - cplx(1.0)) < 1e-12);
  CHECK(pl(1.0) == cplx(0.0));

  CHECK_THROWS_AS(compose_smooth(SmoothFunction::bump(0.0, 0.5), f), DomainError);
  const EFunction complex_f(0.0, {{1.0, cplx(0, 1), 1}});
  CHECK_THROWS_AS(compose_smooth(g, complex_f), DomainError);
}

TEST_CASE("tensor products") {
  const auto p1 = SmoothFunction::bump(0.0, 1.0), p2 = SmoothFunction::plateau(1, 2, 0.5);
  const auto t = tensorize({p1, p2});
  const double x[2] = {0.3, 1.7};
  CHECK(t(x) == p1(0.3) * p2(1.7));
  const auto t1 = tensorize({p1});
  const double y[1] = {0.4};
  CHECK(t1(y) == p1(0.4));
  const auto two = t + tensorize({p2, p1}).scaled(2.0);
  CHECK(std::abs(two(x) - (p1(0.3) * p2(1.7) + 2.0 * p2(0.3) * p1(1.7))) < 1e-15);
  const auto d = t.diagonal();
  CHECK(std::abs(d(0.9) - p1(0.9) * p2(0.9)) < 1e-15);
}

TEST_CASE("json round trip preserves values") {
  for (const auto& f : sample_tree_family()) {
    const auto g = io::smooth_from_json(io::to_json(f));
    for (double x = -1.5; x <= 1.5; x += 0.1) CHECK(std::abs(f.eval(x, 2) - g.eval(x, 2)) < 1e-12);
  }
  const EFunction e(cplx(1, 2), {{cplx(0.5), cplx(0, 1), 2}}, SmoothFunction::bump(0, 1));
  const auto e2 = io::efunction_from_json(io::to_json(e));
  CHECK(std::abs(e(0.2) - e2(0.2)) < 1e-15);
  const auto t = tensorize({SmoothFunction::bump(0, 1), SmoothFunction::bump(1, 1)});
  const auto t2 = io::tensor_from_json(io::to_json(t));
  const double x[2] = {0.1, 0.8};
  CHECK(t(x) == t2(x));
  CHECK_THROWS_AS(io::smooth_from_json(io::json{{"type", "nope"}}), DomainError);
}
