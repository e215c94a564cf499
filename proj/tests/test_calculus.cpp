#include "fcalc/calculus/calculus.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fcalc;
using namespace fcalc::calculus;

namespace {

SmoothFunction unit_bump(double c, double h) { return scale(std::exp(1.0), SmoothFunction::bump(c, h)); }

std::vector<double> spectrum(int n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> e(static_cast<std::size_t>(n));
  for (double& v : e) v = u(rng);
  return e;
}

Matrix oracle(const SmoothFunction& f, const Operator& p) {
  return eigen_oracle([&](cplx x) { return f(x.real()); }, p);
}

CalculusOptions method(ahx::Method m) {
  CalculusOptions o;
  o.extension.method = m;
  return o;
}

}  // namespace

TEST_CASE("scalar operators reduce to evaluation") {
  for (const double lam : {0.3, -0.45, 0.9}) {
    const auto f = SmoothFunction::bump(0.1, 1.0);
    const CalculusResult r = apply_single(f, Operator(Matrix::Constant(1, 1, lam)));
    CHECK(std::abs(r.value(0, 0) - f(lam)) <= 1e-7);
    CHECK(r.error_estimate > 0.0);
    CHECK(r.node_count > 0);
  }
}

TEST_CASE("one near the spectrum gives the identity, disjoint support gives zero") {
  std::mt19937_64 rng(1);
  const Operator p(symmetric_with_spectrum(spectrum(4, -1.0, 1.0, rng), rng));
  const CalculusResult one = apply_single(SmoothFunction::plateau(-1.2, 1.2, 0.4), p);
  CHECK(norm2(one.value - Matrix::Identity(4, 4)) <= 1e-6);
  const CalculusResult zero = apply_single(SmoothFunction::bump(2.5, 0.5), p);
  CHECK(norm2(zero.value) <= 1e-6);
}

TEST_CASE("both extensions agree with the eigen oracle") {
  std::mt19937_64 rng(2);
  const Operator p(symmetric_with_spectrum(spectrum(5, -1.0, 1.0, rng), rng));
  const auto f = SmoothFunction::bump(0.2, 1.1);
  const Matrix ref = oracle(f, p);
  const Matrix a = apply_single(f, p, method(ahx::Method::fourier)).value;
  const Matrix b = apply_single(f, p, method(ahx::Method::taylor)).value;
  CHECK(norm2(a - ref) <= 1e-6);
  CHECK(norm2(b - ref) <= 1e-6);
  CHECK(norm2(a - b) <= 1e-6);
}

TEST_CASE("refinement meets its tolerance and keeps a trace") {
  std::mt19937_64 rng(3);
  const Operator p(symmetric_with_spectrum(spectrum(3, -1.0, 1.0, rng), rng));
  CalculusOptions o;
  o.refine = true;
  o.tolerance = 1e-8;
  const CalculusResult r = apply_single(SmoothFunction::bump(0.0, 1.2), p, o);
  CHECK(r.error_estimate <= 1e-8);
  CHECK(r.trace.size() >= 2);
  CHECK(norm2(r.value - oracle(SmoothFunction::bump(0.0, 1.2), p)) <= 1e-8);
}

TEST_CASE("non-real spectrum and slow extensions are refused") {
  CHECK_THROWS_AS(apply_single(SmoothFunction::bump(0.0, 1.0), Operator(rotation(0.7))), SpectrumError);
  Matrix j = Matrix::Zero(2, 2);
  j(0, 0) = j(1, 1) = 0.2;
  j(0, 1) = 1.0;
  CalculusOptions o = method(ahx::Method::taylor);
  o.extension.taylor.order = 1;  // growth of a Jordan block is |y|^-2
  CHECK_THROWS_AS(apply_single(SmoothFunction::bump(0.0, 1.0), Operator(j), o), DomainError);
}

TEST_CASE("Jordan block: f(P) = f(l) I + f'(l) N") {
  Matrix j = Matrix::Zero(2, 2);
  j(0, 0) = j(1, 1) = 0.2;
  j(0, 1) = 1.0;
  const auto f = SmoothFunction::bump(0.0, 1.0);
  Matrix ref = f(0.2) * Matrix::Identity(2, 2);
  ref(0, 1) = f.eval(0.2, 1);
  CHECK(norm2(apply_single(f, Operator(j)).value - ref) <= 1e-6);
}

TEST_CASE("tensor law, orderings and the iterated path") {
  std::mt19937_64 rng(4);
  const OperatorTuple t({Operator(symmetric_with_spectrum(spectrum(3, -1.0, 1.0, rng), rng)),
                         Operator(symmetric_with_spectrum(spectrum(3, -1.0, 1.0, rng), rng))});
  const auto p1 = unit_bump(0.0, 1.1), p2 = unit_bump(0.1, 1.0);
  const TensorFunction f = tensorize({p1, p2});
  const Matrix a = apply_single(p1, t[0]).value, b = apply_single(p2, t[1]).value;
  const CalculusResult m = apply_multi(f, t);
  CHECK(norm2(m.value - a * b) <= 1e-5);
  CHECK(norm2(apply_ordered(f, t, {1, 0}).value - b * a) <= 1e-5);
  const Matrix same = apply_ordered(f, t, {0, 1}).value;
  CHECK((same - m.value).cwiseAbs().maxCoeff() == 0.0);
  CHECK(norm2(apply_iterated(f, t).value - m.value) <= 1e-5);
  const Matrix mid = random_gaussian(3, rng);
  CHECK(norm2(apply_iterated(f, t, {}, &mid).value - a * mid * b) <= 1e-5);
  CHECK_THROWS_AS(apply_ordered(tensorize({p1}), t, {0}), DomainError);
}

TEST_CASE("restriction to the diagonal") {
  std::mt19937_64 rng(5);
  const Operator p(symmetric_with_spectrum(spectrum(4, -1.0, 1.0, rng), rng));
  const TensorFunction f({{1.0, {unit_bump(0.0, 1.0), unit_bump(0.2, 1.1)}},
                          {cplx(0.0, 0.5), {SmoothFunction::plateau(-0.5, 0.5, 0.4), unit_bump(-0.1, 1.2)}}});
  const Matrix lhs = apply_multi(f, OperatorTuple({p, p})).value;
  CHECK(norm2(lhs - apply_single(f.diagonal(), p).value) <= 1e-5);
}

TEST_CASE("rotated projector pair") {
  const double e = 0.1;
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  const Matrix u = rotation(-e);
  const OperatorTuple t({Operator(a), Operator(Matrix(u.inverse() * a * u))});
  const Matrix r = apply_multi(tensorize({unit_bump(0.0, 0.4), unit_bump(1.0, 0.4)}), t).value;
  CHECK(std::abs(r(1, 0) - std::sin(e) * std::cos(e)) <= 1e-4);
  CHECK(std::abs(r(1, 1) - std::sin(e) * std::sin(e)) <= 1e-4);
  CHECK(std::abs(r(0, 0)) + std::abs(r(0, 1)) <= 1e-6);
}

TEST_CASE("E functions: both paths, constants, products") {
  Matrix d = Matrix::Zero(2, 2);
  d(1, 1) = 1.0;
  const Operator p(d);
  Matrix closed = Matrix::Zero(2, 2);
  closed(0, 0) = -I;
  closed(1, 1) = -(1.0 + I) / 2.0;
  const EFunction w = EFunction::omega(I);
  CHECK(norm2(apply_E(w, p, EPath::exact).value - closed) <= 1e-15);
  const CalculusResult in = apply_E(w, p, EPath::integral);
  CHECK(norm2(in.value - closed) <= 1e-4);
  CHECK(norm2(in.value - closed) <= 10.0 * in.error_estimate);

  const CalculusResult c = apply_E(EFunction::constant(2.5), p, EPath::integral);
  CHECK(norm2(c.value - 2.5 * Matrix::Identity(2, 2)) == 0.0);

  std::mt19937_64 rng(6);
  const Operator q(symmetric_with_spectrum(spectrum(3, -0.8, 0.8, rng), rng));
  const EFunction f2 = add_E(EFunction::omega(2.0 * I), EFunction::compact(SmoothFunction::bump(0.3, 0.8)));
  const Matrix lhs = apply_E(multiply_E(w, f2), q, EPath::exact).value;
  CHECK(norm2(lhs - apply_E(w, q, EPath::exact).value * apply_E(f2, q, EPath::exact).value) <= 1e-6);
  // second-order pole through the annulus rule
  const EFunction w2(0.0, {{1.0, cplx(0.2, 0.5), 2}});
  CHECK(norm2(apply_E(w2, q, EPath::integral).value - apply_E(w2, q, EPath::exact).value) <= 1e-6);
}

TEST_CASE("circle series") {
  std::mt19937_64 rng(7);
  const Operator p(symmetric_with_spectrum(spectrum(3, -1.5, 1.5, rng), rng));
  const Operator b = cayley(p);
  const CircleResult w = apply_circle([](double th) { return std::polar(1.0, th); }, b, 16);
  CHECK(norm2(w.value - b.matrix()) <= 1e-12);
  CHECK(std::abs(w.coefficients[17] - 1.0) <= 1e-14);
  const CircleResult one = apply_circle([](double) { return cplx(1.0); }, b, 16);
  CHECK(norm2(one.value - Matrix::Identity(3, 3)) <= 1e-12);
  CHECK(one.tail_bound <= 1e-14);
  CHECK_THROWS_AS(apply_circle([](double) { return cplx(1.0); }, Operator(Matrix(2.0 * Matrix::Identity(2, 2)))),
                  SpectrumError);

  // a function of x pulled back through the Cayley map
  const EFunction cosine(1.0, {{-I, I, 1}, {I, -I, 1}});
  const SmoothFunction f = compose_smooth(unit_bump(-0.55, 1.35), cosine);
  const CircleResult c = apply_circle(circle_pullback(f), b, 64);
  CHECK(norm2(c.value - oracle(f, p)) <= 1e-5);
  CHECK(c.tail_bound <= 1e-4);
}

TEST_CASE("generator recovery") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  const auto h = CalculusHomomorphism::from_operator(Operator(d), EPath::exact);
  CHECK(h.multiplicativity_defect() <= 1e-12);
  const Recovery r = recover_generator(h, I);
  CHECK(norm2(r.generator - d) <= 1e-10);
  CHECK(r.z_independence <= 1e-8);
  CHECK_THROWS_AS(recover_generator(h, 0.5), DomainError);

  std::mt19937_64 rng(8);
  const Matrix s = symmetric_with_spectrum(spectrum(3, -1.0, 1.0, rng), rng);
  const auto hi = CalculusHomomorphism::from_operator(Operator(s), EPath::integral);
  CHECK(norm2(recover_generator(hi, I).generator - s) <= 1e-5);

  // not multiplicative: refused at registration, and z-dependent when forced through
  const Operator p(s);
  auto skewed = [p](const EFunction& f) { return Matrix(apply_E(f, p, EPath::exact).value + 1e-3 * f(5.0) * Matrix::Identity(3, 3)); };
  CHECK_THROWS_AS(CalculusHomomorphism(skewed, 3, "skewed"), DomainError);
  const CalculusHomomorphism forced(skewed, 3, "skewed", 1e300);
  CHECK_THROWS_AS(recover_generator(forced, I), ConvergenceError);
  CHECK_THROWS_AS(CalculusHomomorphism([](const EFunction&) { return Matrix(Matrix::Zero(2, 2)); }, 2, "zero"),
                  SingularityError);
}

TEST_CASE("composition against the eigen oracle") {
  std::mt19937_64 rng(9);
  const Operator p(symmetric_with_spectrum({-1.6, -0.5, 0.4, 2.0}, rng));
  const EFunction f = add_E(EFunction::omega(I), EFunction::omega(-I));
  const SmoothFunction g = unit_bump(0.6, 0.3);
  const Composition c = compose_calculus(g, f, p, method(ahx::Method::taylor));
  const Matrix ref = eigen_oracle([&](cplx x) { return g(f(x.real()).real()); }, p);
  CHECK(norm2(c.lhs - c.rhs) <= 1e-4);
  CHECK(norm2(c.lhs - ref) <= 1e-4);
  CHECK(norm2(c.lhs) > 0.1);
  const Composition z = compose_calculus(SmoothFunction::zero(), f, p);
  CHECK(norm2(z.lhs) == 0.0);
  CHECK(norm2(z.rhs) == 0.0);
  CHECK_THROWS_AS(compose_calculus(g, EFunction::omega(I), p), DomainError);
}

TEST_CASE("linearity and a distribution-type bound") {
  std::mt19937_64 rng(10);
  const Operator p(symmetric_with_spectrum(spectrum(4, -1.0, 1.0, rng), rng));
  const auto f = SmoothFunction::bump(0.0, 1.0), g = SmoothFunction::bump(0.3, 0.8);
  const cplx a(0.7, -0.2), b(-1.3, 0.0);
  // each side has its own layout, so linearity holds to quadrature accuracy
  const Matrix lhs = apply_single(a * f + b * g, p).value;
  CHECK(norm2(lhs - (a * apply_single(f, p).value + b * apply_single(g, p).value)) <= 1e-7);

  // ||f(P)|| / max_{k <= 2} sup |f^(k)| stays bounded over random bumps on a fixed set
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto h = SmoothFunction::bump(-0.5 + u(rng), 0.5 + u(rng));
    worst = std::max(worst, norm2(apply_single(h, p, method(ahx::Method::taylor)).value) / h.sup_norm(2));
  }
  MESSAGE("distribution bound constant " << worst);
  CHECK(worst <= 1.0);
}

TEST_CASE("norm-Lipschitz dependence on the operator") {
  std::mt19937_64 rng(11);
  const Matrix p = symmetric_with_spectrum(spectrum(4, -1.0, 1.0, rng), rng);
  Matrix e = random_symmetric(4, rng);
  e /= norm2(e);
  const auto f = SmoothFunction::bump(0.1, 1.2);
  const Matrix fp = apply_single(f, Operator(p)).value;
  std::vector<double> ratios;
  for (const double eps : {1e-1, 1e-2, 1e-3})
    ratios.push_back(norm2(apply_single(f, Operator(Matrix(p + eps * e))).value - fp) / eps);
  MESSAGE("Lipschitz ratios " << ratios[0] << " " << ratios[1] << " " << ratios[2]);
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi <= 2.0 * f.sup_norm(1));
  CHECK(*hi <= 2.0 * *lo);
}

TEST_CASE("commuting tuples: support and products") {
  std::mt19937_64 rng(12);
  const Matrix q = symmetric_with_spectrum({0.0, 1.0, 2.0}, rng);
  Eigen::SelfAdjointEigenSolver<Matrix> es(q);
  const Matrix v = es.eigenvectors();
  auto diag = [&](double x, double y, double z) {
    Vector d(3);
    d << x, y, z;
    return Matrix(v * d.asDiagonal() * v.adjoint());
  };
  const OperatorTuple t({Operator(diag(0.0, 1.0, -0.5)), Operator(diag(2.0, 3.0, 2.5))});
  // peaks at joint points, nothing at the mixed ones
  CHECK(norm2(apply_multi(tensorize({unit_bump(0.0, 0.3), unit_bump(2.0, 0.3)}), t).value) >= 0.5);
  CHECK(norm2(apply_multi(tensorize({unit_bump(0.0, 0.3), unit_bump(3.0, 0.3)}), t).value) <= 1e-6);
  CHECK(norm2(apply_multi(tensorize({unit_bump(1.0, 0.3), unit_bump(2.0, 0.3)}), t).value) <= 1e-6);

  const TensorFunction f({{1.0, {unit_bump(0.0, 0.8), unit_bump(2.5, 1.0)}}});
  const TensorFunction g({{cplx(0.5, 0.5), {unit_bump(0.5, 1.2), SmoothFunction::plateau(1.8, 3.2, 0.4)}}});
  const Matrix lhs = apply_multi(f * g, t).value;
  CHECK(norm2(lhs - apply_multi(f, t).value * apply_multi(g, t).value) <= 1e-5);
  const Matrix ref = eigen_oracle([&](const std::vector<cplx>& x) {
    const double xr[2] = {x[0].real(), x[1].real()};
    return (f * g)(xr);
  }, t);
  CHECK(norm2(lhs - ref) <= 1e-5);
}

TEST_CASE("support containment for a non-commuting pair") {
  std::mt19937_64 rng(13);
  const OperatorTuple t({Operator(symmetric_with_spectrum(spectrum(3, -1.0, 1.0, rng), rng)),
                         Operator(symmetric_with_spectrum(spectrum(3, -1.0, 1.0, rng), rng))});
  CHECK(!is_commuting(t));
  CHECK(norm2(apply_multi(tensorize({unit_bump(2.5, 0.8), unit_bump(0.0, 1.0)}), t).value) <= 1e-6);
  CHECK(norm2(apply_multi(tensorize({unit_bump(0.0, 1.0), unit_bump(-2.5, 0.8)}), t).value) <= 1e-6);
}

TEST_CASE("result serialization") {
  const CalculusResult r = apply_single(SmoothFunction::bump(0.0, 1.0), Operator(Matrix::Constant(1, 1, 0.2)));
  const nlohmann::json j = to_json(r);
  CHECK(j.at("method") == "fourier");
  CHECK(j.at("node_count").get<long>() == r.node_count);
  CHECK(j.at("diagnostics").contains("growth"));
}
