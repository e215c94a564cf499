#include "fcalc/ahx/extension.hpp"
#include "fcalc/quad/gauss.hpp"
#include "fcalc/quad/plane.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace fcalc;
using namespace fcalc::quad;

namespace {

// simple polynomial weight on a small box, used where only algebra matters
FunctionWeight box_weight(cplx c = 1.0) {
  WeightRegion r;
  r.x0 = -1.0;
  r.x1 = 1.0;
  r.y_max = 1.0;
  r.y_floor = 0.25;
  // identically zero below the floor, so nothing is neglected
  return FunctionWeight([c](cplx z) { return std::abs(z.imag()) < 0.25 ? cplx(0.0) : c * (1.0 + z * z); },
                        [c](double, double hi) { return hi <= 0.25 ? 0.0 : 3.0 * std::abs(c); }, r);
}

QuadratureSpec small_spec() {
  QuadratureSpec s;
  s.nx = 2;
  s.ny = 2;
  s.q = 4;
  s.y_min = 0.25;
  s.max_aspect = s.aspect;
  return s;
}

cplx cauchy_green(const ahx::Extension1D& e, cplx w0, const QuadratureSpec& s, double* est = nullptr,
                  long* nodes = nullptr) {
  CauchyKernelField k(w0);
  const PlaneIntegral r = integrate_plane(e, k, s);
  if (est) *est = r.error_estimate / pi + r.neglected;
  if (nodes) *nodes = r.node_count;
  return -r.value(0, 0) / pi;
}

}  // namespace

TEST_CASE("Gauss-Legendre exactness") {
  for (int q : {1, 2, 5, 8, 16, 24}) {
    const GaussRule& g = gauss_legendre(q);
    REQUIRE(g.nodes.size() == static_cast<std::size_t>(q));
    for (int k = 0; k <= 2 * q - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < q; ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      CHECK(std::abs(s - exact) < 1e-14);
    }
  }
}

TEST_CASE("inverse distance integral") {
  const GaussRule& g = gauss_legendre(20);
  auto brute = [&](cplx c, double x0, double x1, double y0, double y1) {
    double s = 0.0;
    const int n = 16;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double ax = x0 + (x1 - x0) * a / n, bx = x0 + (x1 - x0) * (a + 1) / n;
        const double ay = y0 + (y1 - y0) * b / n, by = y0 + (y1 - y0) * (b + 1) / n;
        for (int i = 0; i < 20; ++i)
          for (int k = 0; k < 20; ++k) {
            const cplx z(0.5 * (ax + bx) + 0.5 * (bx - ax) * g.nodes[i], 0.5 * (ay + by) + 0.5 * (by - ay) * g.nodes[k]);
            s += 0.25 * (bx - ax) * (by - ay) * g.weights[i] * g.weights[k] / std::abs(z - c);
          }
      }
    return s;
  };
  CHECK(std::abs(inverse_distance_integral(cplx(3.0, 2.0), -1.0, 1.0, 0.0, 0.5) -
                 brute(cplx(3.0, 2.0), -1.0, 1.0, 0.0, 0.5)) < 1e-12);
  CHECK(std::abs(inverse_distance_integral(cplx(0.1, 0.7), -1.0, 1.0, 0.0, 0.5) -
                 brute(cplx(0.1, 0.7), -1.0, 1.0, 0.0, 0.5)) < 1e-9);
  // singular point inside: additivity over the four corner rectangles
  const cplx c(0.2, 0.1);
  const double whole = inverse_distance_integral(c, -1.0, 1.0, -0.5, 0.5);
  const double parts = inverse_distance_integral(c, -1.0, 0.2, -0.5, 0.1) +
                       inverse_distance_integral(c, 0.2, 1.0, -0.5, 0.1) +
                       inverse_distance_integral(c, -1.0, 0.2, 0.1, 0.5) +
                       inverse_distance_integral(c, 0.2, 1.0, 0.1, 0.5);
  CHECK(std::abs(whole - parts) < 1e-13);
  // square of side 2a centred on c: 8a asinh(1)
  CHECK(std::abs(inverse_distance_integral(c, -0.8, 1.2, -0.9, 1.1) - 8.0 * std::asinh(1.0)) < 1e-13);
}

TEST_CASE("zero weight integrates to exactly zero") {
  const auto e = ahx::extend(SmoothFunction::zero(), {});
  std::mt19937_64 rng(1);
  const Operator p(random_symmetric(3, rng));
  const PlaneIntegral r = integrate_plane(*e, ResolventField(p), QuadratureSpec::single_default());
  CHECK(r.value.norm() == 0.0);
  CHECK(r.error_estimate == 0.0);
  CHECK(r.node_count == 0);
}

TEST_CASE("Cauchy-Green identity with honest estimates") {
  const auto f = SmoothFunction::bump(0.1, 0.9);
  for (const auto method : {ahx::Method::fourier, ahx::Method::taylor}) {
    ahx::ExtensionOptions eo;
    eo.method = method;
    const auto e = ahx::extend(f, eo);
    for (const cplx w0 : {cplx(2.0, 0.3), cplx(0.5, 0.3), cplx(0.0, 0.05), cplx(0.3, -0.6), cplx(0.95, 0.02)}) {
      double est = 0.0;
      const cplx v = cauchy_green(*e, w0, QuadratureSpec::single_default(), &est);
      const double err = std::abs(v - e->value(w0));
      CHECK(err <= 1e-6);
      CHECK(err <= 10.0 * est);
    }
  }
}

TEST_CASE("Cauchy-Green convergence order under refinement") {
  const auto e = ahx::extend(SmoothFunction::bump(0.1, 0.9), {});
  const cplx w0(0.5, 0.3);
  std::vector<double> le, ln;
  QuadratureSpec s = QuadratureSpec::single_default();
  for (int level = 0; level < 2; ++level, s = s.refined()) {
    long nodes = 0;
    const double err = std::abs(cauchy_green(*e, w0, s, nullptr, &nodes) - e->value(w0));
    le.push_back(std::log(err));
    ln.push_back(std::log(std::sqrt(static_cast<double>(nodes))));  // panels per direction
  }
  const double slope = -(le[1] - le[0]) / (ln[1] - ln[0]);
  MESSAGE("Cauchy-Green convergence slope " << slope);
  CHECK(slope >= 4.0);
}

TEST_CASE("real function of a real symmetric matrix comes out real") {
  std::mt19937_64 rng(2);
  const Operator p(random_symmetric(4, rng));
  const auto e = ahx::extend(SmoothFunction::bump(0.0, 1.5), {});
  const PlaneIntegral r = integrate_plane(*e, ResolventField(p), QuadratureSpec::single_default());
  const Matrix fp = -r.value / pi;
  CHECK(fp.imag().norm() <= 1e-9);
  CHECK(fp.real().norm() > 0.1);
}

TEST_CASE("determinism across threads and reruns") {
  std::mt19937_64 rng(3);
  const Operator p(random_symmetric(4, rng));
  const auto e = ahx::extend(SmoothFunction::bump(0.2, 1.2), {});
  QuadratureSpec s = QuadratureSpec::single_default();
  const PlaneIntegral a = integrate_plane(*e, ResolventField(p), s);
  const PlaneIntegral b = integrate_plane(*e, ResolventField(p), s);
  s.threads = 3;
  const PlaneIntegral c = integrate_plane(*e, ResolventField(p), s);
  CHECK((a.value.array() == b.value.array()).all());
  CHECK((a.value.array() == c.value.array()).all());
  CHECK(a.error_estimate == c.error_estimate);
}

TEST_CASE("factorized and brute-force products agree") {
  std::mt19937_64 rng(4);
  const Operator p1(random_symmetric(4, rng)), p2(random_symmetric(4, rng));
  const ResolventField r1(p1), r2(p2);
  const FunctionWeight w1 = box_weight(), w2 = box_weight(cplx(0.5, -1.0));
  const std::vector<MultiTerm> terms = {{1.0, {&w1, &w2}}, {cplx(0.0, 2.0), {&w2, &w1}}};
  const std::vector<QuadratureSpec> specs = {small_spec()};
  for (const std::vector<int>& order : {std::vector<int>{0, 1}, std::vector<int>{1, 0}}) {
    const PlaneIntegral f = integrate_multi(terms, {&r1, &r2}, order, specs, MultiPath::factorized);
    const PlaneIntegral b = integrate_multi(terms, {&r1, &r2}, order, specs, MultiPath::brute_force);
    CHECK(norm2(f.value - b.value) <= 1e-12 * norm2(f.value));
    CHECK(norm2(f.coarse - b.coarse) <= 1e-12 * norm2(f.coarse));
  }
}

TEST_CASE("m = 1 multi integral is the plane integral") {
  std::mt19937_64 rng(5);
  const Operator p(random_symmetric(3, rng));
  const ResolventField r(p);
  const auto e = ahx::extend(SmoothFunction::bump(0.0, 1.0), {});
  const QuadratureSpec s = QuadratureSpec::single_default();
  const PlaneIntegral a = integrate_plane(*e, r, s);
  const PlaneIntegral b = integrate_multi({{1.0, {e.get()}}}, {&r}, {0}, {s});
  CHECK((a.value.array() == b.value.array()).all());
  CHECK((a.coarse.array() == b.coarse.array()).all());
}

TEST_CASE("linearity in the weight") {
  std::mt19937_64 rng(6);
  const Operator p(random_symmetric(3, rng));
  const ResolventField r(p);
  // a-priori panel choices depend on the weight's size; pin them
  QuadratureSpec s = small_spec();
  s.tolerance = 1e6;
  s.skip_tolerance = 0.0;
  const PlaneIntegral one = integrate_plane(box_weight(), r, s);
  const PlaneIntegral four = integrate_plane(box_weight(4.0), r, s);
  CHECK((four.value.array() == 4.0 * one.value.array()).all());
  const PlaneIntegral three = integrate_plane(box_weight(3.0), r, s);
  CHECK(norm2(three.value - 3.0 * one.value) <= 1e-15 * norm2(three.value));
}

TEST_CASE("refine_until") {
  std::mt19937_64 rng(7);
  const Operator p(random_symmetric(2, rng));
  const ResolventField r(p);
  const FunctionWeight w = box_weight();
  const QuadTask task = [&](const QuadratureSpec& s) { return integrate_plane(w, r, s); };
  const PlaneIntegral direct = task(small_spec());
  const PlaneIntegral done = refine_until(task, small_spec(), 1.0, 1'000'000);
  CHECK(done.trace.size() == 1);
  CHECK((done.value.array() == direct.value.array()).all());

  const PlaneIntegral fine = refine_until(task, small_spec(), 1e-8, 10'000'000);
  CHECK(fine.trace.size() > 1);
  CHECK(fine.error_estimate <= 1e-8);
  for (std::size_t k = 1; k < fine.trace.size(); ++k) CHECK(fine.trace[k].nodes > fine.trace[k - 1].nodes);

  try {
    refine_until(task, small_spec(), 1e-30, 200'000);
    FAIL("expected a refinement failure");
  } catch (const RefinementFailure& e) {
    CHECK(!e.trace().empty());
    CHECK(e.achieved() > 0.0);
  }
  std::ostringstream os;
  write_trace_csv(os, fine.trace);
  CHECK(os.str().rfind("level,nodes,error_estimate\n", 0) == 0);
}

TEST_CASE("annulus rule reproduces the Cauchy-Green identity for a pole cutoff") {
  const auto e = ahx::extend_pole({cplx(1.0, 0.5), cplx(0.3, 0.8), 2});
  for (const cplx w0 : {cplx(0.0), cplx(0.7, -0.2), cplx(0.3, 0.9), cplx(0.8, 0.8)}) {
    CauchyKernelField k(w0);
    AnnulusRule rule;
    rule.center = e->zeta();
    rule.r_in = 0.5 * e->radius();
    rule.r_out = e->radius();
    const PlaneIntegral r = integrate_annulus([&](cplx z) { return e->dbar(z); }, k, rule);
    // f~ decays at infinity and dbar f~ has compact support, so no boundary term
    CHECK(std::abs(-r.value(0, 0) / pi - e->value(w0)) <= 1e-10);
  }
}

TEST_CASE("spec json round trip") {
  QuadratureSpec s = QuadratureSpec::multi_default();
  s.subdivide = 4;
  s.tolerance = 3e-7;
  const QuadratureSpec t = spec_from_json(to_json(s));
  CHECK(to_json(t) == to_json(s));
  CHECK_THROWS_AS(spec_from_json(nlohmann::json{{"qq", 3}}), DomainError);
  CHECK_THROWS_AS(spec_from_json(nlohmann::json{{"q", 0}}), DomainError);
  CHECK(spec_from_json(nlohmann::json{{"q", 10}}).nx == 16);
}
