#include "fcalc/xlab/xlab.hpp"

#include "fcalc/ahx/extension.hpp"
#include "fcalc/funcalg/json_io.hpp"
#include "fcalc/linop/json_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <map>
#include <set>

namespace fcalc::xlab {

using calculus::CalculusOptions;
using calculus::CalculusResult;
using calculus::EPath;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json mat(const Matrix& m) {
  if (m.rows() <= 4) return io::matrix_to_json(m);
  return {{"norm", norm2(m)}, {"rows", m.rows()}};
}

std::string tag(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string idx(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", i);
  return buf;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> uniform_spectrum(Index n, double lo, double hi, std::mt19937_64& rng) {
  std::vector<double> e(static_cast<std::size_t>(n));
  for (double& v : e) v = uniform(rng, lo, hi);
  return e;
}

Matrix random_unitary(Index n, std::mt19937_64& rng) {
  Matrix g = random_gaussian(n, rng) + I * random_gaussian(n, rng);
  return Eigen::HouseholderQR<Matrix>(g).householderQ() * Matrix::Identity(n, n);
}

/// V diag(eig) V^{-1} with V = I + 0.3 G: diagonalizable, not normal.
Matrix diagonalizable(const std::vector<double>& eig, std::mt19937_64& rng) {
  const Index n = static_cast<Index>(eig.size());
  const Matrix v = Matrix::Identity(n, n) + 0.3 * random_gaussian(n, rng) / std::sqrt(static_cast<double>(n));
  Vector d(n);
  for (Index i = 0; i < n; ++i) d(i) = eig[static_cast<std::size_t>(i)];
  return v * d.asDiagonal() * v.partialPivLu().inverse();
}

OperatorTuple tuple_of(const std::vector<Matrix>& ms) {
  std::vector<Operator> ops;
  for (const Matrix& m : ms) ops.emplace_back(m);
  return OperatorTuple(std::move(ops));
}

ScalarFn real_arg(const SmoothFunction& f) {
  return [f](cplx x) { return f(x.real()); };
}

CalculusOptions with_method(CalculusOptions o, ahx::Method m) {
  o.extension.method = m;
  return o;
}

ahx::Method other(ahx::Method m) { return m == ahx::Method::fourier ? ahx::Method::taylor : ahx::Method::fourier; }

// Check of f(P) against the eigen oracle; a declined oracle falls back to the
// other extension method and is marked consistency-only.
Check& single_check(Report& r, const std::string& name, const SmoothFunction& f, const Operator& p,
                    const CalculusOptions& opt, double tol) {
  const auto t0 = Clock::now();
  const CalculusResult res = calculus::apply_single(f, p, opt);
  Matrix ref;
  bool declined = false;
  try {
    ref = eigen_oracle(real_arg(f), p);
  } catch (const OracleDeclined&) {
    declined = true;
    ref = calculus::apply_single(f, p, with_method(opt, other(opt.extension.method))).value;
  }
  Check& c = add_check(r, name, norm2(res.value - ref), tol, mat(res.value), mat(ref));
  c.runtime = since(t0);
  c.nodes = res.node_count;
  if (declined) c.mode = "consistency-only";
  return c;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Threshold check: passes when computed >= bound.
Check& at_least(Report& r, std::string name, double computed, double bound) {
  return add_check(r, std::move(name), std::isnan(computed) ? kNaN : std::max(0.0, bound - computed), 0.0, computed,
                   {{"at_least", bound}});
}

std::vector<std::string> parts_of(const ExperimentConfig& c, std::vector<std::string> all) {
  if (!c.params.contains("parts")) return all;
  return c.params.at("parts").get<std::vector<std::string>>();
}

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

Report start(const char* name, const ExperimentConfig& c) {
  Report r;
  r.experiment = name;
  r.config = c.resolved();
  return r;
}

}  // namespace

SmoothFunction unit_bump(double center, double halfwidth) {
  return scale(std::exp(1.0), SmoothFunction::bump(center, halfwidth));
}

std::pair<Matrix, Matrix> example_pair(double eps) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  const Matrix u = rotation(-eps);
  return {a, u.inverse() * a * u};
}

SmoothFunction circle_friendly(double u_end, double u_start) {
  if (!(u_end < 1.0) || !(u_start < u_end)) throw DomainError("circle_friendly: need u_start < u_end < 1");
  // 1 - 2/(1 + x^2) = 1 - i omega_i + i omega_{-i}
  const EFunction u(1.0, {{-I, I, 1}, {I, -I, 1}});
  return compose_smooth(unit_bump(0.5 * (u_start + u_end), 0.5 * (u_end - u_start)), u);
}

// ---------------------------------------------------------------- apply

Report run_apply(const ExperimentConfig& c) {
  Report r = start("apply", c);
  const CalculusOptions opt = c.options();
  const std::string mode = c.get<std::string>("mode", "E");

  if (mode == "single") {
    const Operator p(load_matrix(c.params.at("operator")));
    single_check(r, "single", io::smooth_from_json(c.params.at("function")), p, opt, c.tolerance("single", 1e-5));
    return r;
  }
  if (mode == "multi") {
    const OperatorTuple t = tuple_of(load_matrices(c.params.at("operators")));
    const TensorFunction f = io::tensor_from_json(c.params.at("function"));
    std::vector<int> order(t.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
    order = c.get<std::vector<int>>("order", order);
    const auto t0 = Clock::now();
    const CalculusResult res = calculus::apply_ordered(f, t, order, opt);
    Matrix ref;
    bool declined = false;
    const bool identity_order = std::is_sorted(order.begin(), order.end());
    try {
      if (!identity_order && !is_commuting(t)) throw OracleDeclined("ordered product of a non-commuting tuple");
      ref = eigen_oracle([&](const std::vector<cplx>& x) {
        std::vector<double> xr;
        for (cplx v : x) xr.push_back(v.real());
        return f(xr);
      }, t);
    } catch (const OracleDeclined&) {
      declined = true;
      ref = calculus::apply_ordered(f, t, order, with_method(opt, other(opt.extension.method))).value;
    }
    Check& ch = add_check(r, "multi", norm2(res.value - ref), c.tolerance("multi", 1e-5), mat(res.value), mat(ref));
    ch.runtime = since(t0);
    ch.nodes = res.node_count;
    if (declined) ch.mode = "consistency-only";
    return r;
  }
  if (mode != "E") throw DomainError("apply: unknown mode '" + mode + "'");

  Matrix pm = Matrix::Zero(2, 2);
  pm(1, 1) = 1.0;
  if (c.params.contains("operator")) pm = load_matrix(c.params.at("operator"));
  const Operator p(pm);
  const EFunction f = c.params.contains("function") ? io::efunction_from_json(c.params.at("function")) : EFunction::omega(I);
  const Index n = p.dim();

  auto t0 = Clock::now();
  const Matrix ref = eigen_oracle([&](cplx x) { return f(x.real()); }, p);
  const CalculusResult ex = calculus::apply_E(f, p, EPath::exact, opt);
  Check& ce = add_check(r, "e_exact", norm2(ex.value - ref), c.tolerance("e_exact", 1e-14 * std::max(1.0, norm2(ref))),
                        mat(ex.value), mat(ref));
  ce.runtime = since(t0);
  t0 = Clock::now();
  const CalculusResult in = calculus::apply_E(f, p, EPath::integral, opt);
  Check& ci = add_check(r, "e_integral", norm2(in.value - ref), c.tolerance("e_integral", 1e-4), mat(in.value), mat(ref));
  ci.runtime = since(t0);
  ci.nodes = in.node_count;
  add_check(r, "e_paths_agree", norm2(in.value - ex.value), c.tolerance("e_paths_agree", 1e-4), mat(in.value),
            mat(ex.value))
      .mode = "consistency-only";

  const cplx a0(0.75, -0.25);
  const Matrix cst = calculus::apply_E(EFunction::constant(a0), p, EPath::integral, opt).value;
  add_check(r, "e_constant", norm2(cst - a0 * Matrix::Identity(n, n)), 0.0, mat(cst));

  // the product of the two sides against the product function, on both paths
  const EFunction f1 = EFunction::omega(I);
  const EFunction f2 = add_E(EFunction::omega(2.0 * I), EFunction::compact(SmoothFunction::bump(0.3, 0.8)));
  for (const EPath path : {EPath::exact, EPath::integral}) {
    t0 = Clock::now();
    const CalculusResult prod = calculus::apply_E(multiply_E(f1, f2), p, path, opt);
    const Matrix rhs = calculus::apply_E(f1, p, path, opt).value * calculus::apply_E(f2, p, path, opt).value;
    Check& cm = add_check(r, std::string("e_multiplicativity/") + (path == EPath::exact ? "exact" : "integral"),
                          norm2(prod.value - rhs), c.tolerance("e_multiplicativity", 1e-6), mat(prod.value), mat(rhs));
    cm.runtime = since(t0);
    cm.nodes = prod.node_count;
    cm.mode = "consistency-only";
  }
  const calculus::CalculusHomomorphism h(
      [&](const EFunction& g) { return calculus::apply_E(g, p, EPath::exact, opt).value; }, n, "operator:exact",
      std::numeric_limits<double>::infinity(), c.seed);
  add_check(r, "e_pole_family_multiplicativity", h.multiplicativity_defect(), c.tolerance("e_multiplicativity", 1e-6),
            h.multiplicativity_defect());
  return r;
}

// ---------------------------------------------------------------- oracle suite

Report run_oracle_suite(const ExperimentConfig& c) {
  Report r = start("oracle-suite", c);
  const CalculusOptions opt = c.options();
  const auto parts =
      parts_of(c, {"scalar", "identity", "offsupport", "projector", "eigen", "tensor", "diagonal", "jordan"});
  const auto sizes = c.get<std::vector<int>>("sizes", {1, 2, 4, 6, 8});
  std::mt19937_64 rng(c.seed);

  if (has(parts, "scalar")) {
    const int cases = c.get<int>("scalar_cases", 10);
    const auto t0 = Clock::now();
    for (int i = 0; i < cases; ++i) {
      const double hw = uniform(rng, 0.7, 1.2), ctr = uniform(rng, -0.5, 0.5);
      const double lam = ctr + hw * uniform(rng, -0.9, 0.9);
      const SmoothFunction f = SmoothFunction::bump(ctr, hw);
      const auto t1 = Clock::now();
      const CalculusResult res = calculus::apply_single(f, Operator(Matrix::Constant(1, 1, lam)), opt);
      Check& ch = add_check(r, "scalar/" + idx(i), std::abs(res.value(0, 0) - f(lam)), c.tolerance("scalar", 1e-7),
                            io::complex_to_json(res.value(0, 0)), io::complex_to_json(f(lam)));
      ch.runtime = since(t1);
      ch.nodes = res.node_count;
    }
    const double total = since(t0);
    add_check(r, "scalar_runtime", total, c.tolerance("scalar_runtime", 2.0), total);
  }

  auto test_matrix = [&](int n, int k, double lo, double hi) {
    const auto e = uniform_spectrum(n, lo, hi, rng);
    return k % 2 == 0 ? symmetric_with_spectrum(e, rng) : diagonalizable(e, rng);
  };

  if (has(parts, "identity") || has(parts, "offsupport")) {
    int k = 0;
    for (const int n : sizes) {
      const Operator p(test_matrix(n, k++, -2.0, 2.0));
      if (has(parts, "identity")) {
        const auto t0 = Clock::now();
        const CalculusResult res = calculus::apply_single(SmoothFunction::plateau(-2.2, 2.2, 0.5), p, opt);
        Check& ch = add_check(r, "identity/n" + std::to_string(n), norm2(res.value - Matrix::Identity(n, n)),
                              c.tolerance("identity", 1e-6), mat(res.value));
        ch.runtime = since(t0);
        ch.nodes = res.node_count;
      }
      if (has(parts, "offsupport")) {
        const auto t0 = Clock::now();
        const CalculusResult res = calculus::apply_single(SmoothFunction::bump(4.0, 0.8), p, opt);
        Check& ch = add_check(r, "offsupport/n" + std::to_string(n), norm2(res.value), c.tolerance("offsupport", 1e-6),
                              mat(res.value));
        ch.runtime = since(t0);
        ch.nodes = res.node_count;
      }
    }
  }

  if (has(parts, "projector")) {
    int k = 0;
    for (const int n : sizes) {
      if (n < 2) continue;
      std::vector<double> e(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i)] = -2.0 + 4.0 * i / (n - 1);
      const Matrix m = k++ % 2 == 0 ? symmetric_with_spectrum(e, rng) : diagonalizable(e, rng);
      const double lam = e[static_cast<std::size_t>(n / 2)];
      single_check(r, "projector/n" + std::to_string(n), SmoothFunction::plateau(lam - 0.05, lam + 0.05, 0.2),
                   Operator(m), opt, c.tolerance("projector", 1e-5));
    }
  }

  if (has(parts, "jordan")) {
    // no eigenbasis: only the two extensions can be compared
    Matrix j = Matrix::Zero(2, 2);
    j(0, 0) = j(1, 1) = 0.3;
    j(0, 1) = 1.0;
    single_check(r, "jordan", SmoothFunction::bump(0.0, 1.0), Operator(j), opt, c.tolerance("jordan", 1e-5));
  }

  if (has(parts, "eigen")) {
    const int cases = c.get<int>("eigen_cases", 3);
    const int n = c.get<int>("eigen_size", 6);
    CalculusOptions ro = opt;
    ro.refine = true;
    if (!c.tol) ro.tolerance = 1e-7;
    for (int i = 0; i < cases; ++i) {
      const Operator p(symmetric_with_spectrum(uniform_spectrum(n, -1.5, 1.5, rng), rng));
      const SmoothFunction f = SmoothFunction::bump(uniform(rng, -0.5, 0.5), uniform(rng, 0.8, 1.4));
      const Matrix ref = eigen_oracle(real_arg(f), p);
      Matrix val[2];
      for (const ahx::Method m : {ahx::Method::fourier, ahx::Method::taylor}) {
        const auto t0 = Clock::now();
        const CalculusResult res = calculus::apply_single(f, p, with_method(ro, m));
        Check& ch = add_check(r, "eigen/" + ahx::to_string(m) + "/" + idx(i), norm2(res.value - ref),
                              c.tolerance("eigen", 1e-5), mat(res.value), mat(ref));
        ch.runtime = since(t0);
        ch.nodes = res.node_count;
        val[m == ahx::Method::taylor] = res.value;
      }
      add_check(r, "independence/" + idx(i), norm2(val[0] - val[1]), c.tolerance("independence", 1e-5), mat(val[0]),
                mat(val[1]))
          .mode = "consistency-only";
    }
  }

  if (has(parts, "tensor")) {
    const int cases = c.get<int>("tensor_cases", 2);
    for (int i = 0; i < cases; ++i) {
      const OperatorTuple t({Operator(symmetric_with_spectrum(uniform_spectrum(4, -1.0, 1.0, rng), rng)),
                             Operator(symmetric_with_spectrum(uniform_spectrum(4, -1.0, 1.0, rng), rng))});
      const SmoothFunction p1 = unit_bump(uniform(rng, -0.3, 0.3), uniform(rng, 0.8, 1.2));
      const SmoothFunction p2 = unit_bump(uniform(rng, -0.3, 0.3), uniform(rng, 0.8, 1.2));
      const TensorFunction f = tensorize({p1, p2});
      const Matrix f1 = calculus::apply_single(p1, t[0], opt).value, f2 = calculus::apply_single(p2, t[1], opt).value;
      const Matrix ref = f1 * f2;
      auto t0 = Clock::now();
      const CalculusResult mres = calculus::apply_multi(f, t, opt);
      Check& ct = add_check(r, "tensor/" + idx(i), norm2(mres.value - ref), c.tolerance("tensor", 1e-5), mat(mres.value),
                            mat(ref));
      ct.runtime = since(t0);
      ct.nodes = mres.node_count;

      const CalculusResult same = calculus::apply_ordered(f, t, {0, 1}, opt);
      add_check(r, "ordered_identity/" + idx(i), (same.value - mres.value).cwiseAbs().maxCoeff(), 0.0);
      const CalculusResult swapped = calculus::apply_ordered(f, t, {1, 0}, opt);
      add_check(r, "ordered_swap/" + idx(i), norm2(swapped.value - f2 * f1), c.tolerance("tensor", 1e-5),
                mat(swapped.value), mat(f2 * f1));

      t0 = Clock::now();
      const CalculusResult it = calculus::apply_iterated(f, t, opt);
      Check& ci = add_check(r, "iterated/" + idx(i), norm2(it.value - mres.value), c.tolerance("iterated", 1e-5),
                            mat(it.value), mat(mres.value));
      ci.runtime = since(t0);
      ci.nodes = it.node_count;
      ci.mode = "consistency-only";

      const Matrix a = random_gaussian(4, rng);
      const CalculusResult mid = calculus::apply_iterated(f, t, opt, &a);
      add_check(r, "iterated_middle/" + idx(i), norm2(mid.value - f1 * a * f2), c.tolerance("iterated", 1e-5),
                mat(mid.value), mat(f1 * a * f2));
    }
  }

  if (has(parts, "diagonal")) {
    const int cases = c.get<int>("diagonal_cases", 2);
    for (int i = 0; i < cases; ++i) {
      const Operator p(symmetric_with_spectrum(uniform_spectrum(4, -1.0, 1.0, rng), rng));
      const OperatorTuple t({p, p});
      const TensorFunction f({{1.0, {unit_bump(0.0, 1.0), unit_bump(uniform(rng, -0.3, 0.3), 1.1)}},
                              {cplx(0.5, -0.25), {unit_bump(0.2, 0.9), SmoothFunction::plateau(-0.6, 0.4, 0.4)}}});
      const auto t0 = Clock::now();
      const CalculusResult mres = calculus::apply_multi(f, t, opt);
      const Matrix ref = calculus::apply_single(f.diagonal(), p, opt).value;
      Check& ch = add_check(r, "diagonal/" + idx(i), norm2(mres.value - ref), c.tolerance("diagonal", 1e-5),
                            mat(mres.value), mat(ref));
      ch.runtime = since(t0);
      ch.nodes = mres.node_count;
    }
  }
  return r;
}

// ---------------------------------------------------------------- perturbation

Report run_perturbation(const ExperimentConfig& c) {
  Report r = start("perturb", c);
  const CalculusOptions opt = c.options();
  const auto eps = c.get<std::vector<double>>("eps", {0.1, 0.05, 0.025});
  const double hw = c.get<double>("halfwidth", 0.4);
  const TensorFunction f = tensorize({unit_bump(0.0, hw), unit_bump(1.0, hw)});

  Table entries{"entries", {"eps", "entry21", "oracle21", "entry22", "oracle22", "norm"}, {}};
  std::vector<double> le, ln;
  for (const double e : eps) {
    const auto [a, ae] = example_pair(e);
    const auto t0 = Clock::now();
    const CalculusResult res = calculus::apply_multi(f, OperatorTuple({Operator(a), Operator(ae)}), opt);
    const double rt = since(t0);
    const cplx o21 = std::sin(e) * std::cos(e), o22 = std::sin(e) * std::sin(e);
    const std::string t = tag("eps=%.4g", e);
    Check& c21 = add_check(r, "entry21/" + t, std::abs(res.value(1, 0) - o21), c.tolerance("entry", 1e-4),
                           io::complex_to_json(res.value(1, 0)), io::complex_to_json(o21));
    c21.runtime = rt;
    c21.nodes = res.node_count;
    add_check(r, "entry22/" + t, std::abs(res.value(1, 1) - o22), c.tolerance("entry", 1e-4),
              io::complex_to_json(res.value(1, 1)), io::complex_to_json(o22));
    add_check(r, "row1/" + t, std::abs(res.value(0, 0)) + std::abs(res.value(0, 1)), c.tolerance("floor", 1e-6),
              mat(res.value));
    const double nv = norm2(res.value);
    entries.rows.push_back({e, res.value(1, 0).real(), o21.real(), res.value(1, 1).real(), o22.real(), nv});
    le.push_back(std::log(e));
    ln.push_back(std::log(nv));
  }
  if (eps.size() >= 2) {
    const double s = ls_slope(le, ln);
    add_check(r, "log_slope", std::abs(s - 1.0), c.tolerance("log_slope", 0.1), s, 1.0);
    r.summary["log_slope"] = s;
  }
  r.tables.push_back(std::move(entries));

  // the four product points and a lattice around them at the first eps
  const auto [a, ae] = example_pair(eps.front());
  const OperatorTuple t({Operator(a), Operator(ae)});
  const Matrix proj[2] = {Matrix(Matrix::Identity(2, 2) - a), a};  // eigenprojectors of A at 0 and 1
  const auto lattice = c.get<std::vector<double>>("lattice", {-0.5, 0.0, 0.5, 1.0, 1.5});
  Table scan{"scan", {"a", "b", "norm", "error_estimate"}, {}};
  double floor = 0.0;
  int peaks = 0;
  for (const double x : lattice)
    for (const double y : lattice) {
      const auto t0 = Clock::now();
      const CalculusResult res = calculus::apply_multi(tensorize({unit_bump(x, hw), unit_bump(y, hw)}), t, opt);
      const double nv = norm2(res.value);
      scan.rows.push_back({x, y, nv, res.error_estimate});
      const bool on = (x == 0.0 || x == 1.0) && (y == 0.0 || y == 1.0);
      if (!on) {
        floor = std::max(floor, nv);
        continue;
      }
      const Matrix u = rotation(-eps.front());
      const Matrix q = u.inverse() * proj[y == 1.0] * u;
      const double on_norm = norm2(proj[x == 1.0] * q);
      peaks += nv >= 1e-3;
      Check& ch = add_check(r, "peak/" + tag("%g", x) + "," + tag("%g", y), std::abs(nv - on_norm),
                            c.tolerance("entry", 1e-4), nv, on_norm);
      ch.runtime = since(t0);
      ch.nodes = res.node_count;
    }
  add_check(r, "peak_count", 4 - peaks, 0.0, peaks, 4);
  add_check(r, "floor", floor, c.tolerance("floor", 1e-6), floor);
  r.tables.push_back(std::move(scan));
  return r;
}

// ---------------------------------------------------------------- commutator

Report run_commutator_bound(const ExperimentConfig& c) {
  Report r = start("commutator", c);
  const CalculusOptions opt = c.options();
  const auto eps = c.get<std::vector<double>>("eps", {1e-1, 1e-2, 1e-3});
  std::mt19937_64 rng(c.seed);
  const Matrix p = symmetric_with_spectrum(uniform_spectrum(4, -0.8, 0.8, rng), rng);
  Matrix e = random_symmetric(4, rng);
  e /= norm2(e);
  const TensorFunction f = tensorize({unit_bump(0.0, 0.9), unit_bump(0.2, 0.9)});

  Table tab{"ratios", {"eps", "difference", "commutator", "ratio"}, {}};
  std::vector<double> ratios;
  for (const double ep : eps) {
    const Matrix q = p + ep * e;
    const auto t0 = Clock::now();
    // same arguments, the two resolvent orders
    const OperatorTuple t({Operator(p), Operator(q)});
    const CalculusResult pq = calculus::apply_ordered(f, t, {0, 1}, opt);
    const CalculusResult qp = calculus::apply_ordered(f, t, {1, 0}, opt);
    const double d = norm2(pq.value - qp.value), cn = commutator_norm(p, q);
    ratios.push_back(d / cn);
    tab.rows.push_back({ep, d, cn, d / cn});
    Check& ch = add_check(r, "ratio/" + tag("eps=%.0e", ep), 0.0, 0.0, d / cn, {{"commutator", cn}});
    ch.runtime = since(t0);
    ch.nodes = pq.node_count + qp.node_count;
    ch.mode = "consistency-only";
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  add_check(r, "ratio_stability", *hi / *lo, c.tolerance("ratio_stability", 5.0), *hi / *lo);
  r.summary["C"] = *hi;
  r.tables.push_back(std::move(tab));

  // a commuting pair (Q a polynomial in P): both orders coincide
  const Matrix qc = 0.5 * p * p - 0.3 * p;
  const OperatorTuple tc({Operator(p), Operator(qc)});
  const Matrix d0 = calculus::apply_ordered(f, tc, {0, 1}, opt).value - calculus::apply_ordered(f, tc, {1, 0}, opt).value;
  add_check(r, "commuting_pair", norm2(d0), c.tolerance("commuting_pair", 1e-6), norm2(d0),
            {{"commutator", commutator_norm(p, qc)}});

  // [R_P(z), R_Q(w)] = R_P(z) R_Q(w) [P, Q] R_Q(w) R_P(z)
  const Matrix q = p + eps.front() * e;
  const cplx z(0.3, 0.2), w(-0.1, 0.5);
  const Matrix rz = Operator(p).resolvent(z), rw = Operator(q).resolvent(w);
  const Matrix lhs = rz * rw - rw * rz;
  const Matrix rhs = rz * rw * (p * q - q * p) * rw * rz;
  add_check(r, "resolvent_identity", norm2(lhs - rhs) / std::max(1.0, norm2(lhs)),
            c.tolerance("resolvent_identity", 1e-10), mat(lhs), mat(rhs));
  return r;
}

// ---------------------------------------------------------------- cayley

Report run_cayley_check(const ExperimentConfig& c) {
  Report r = start("cayley", c);
  const CalculusOptions opt = c.options();
  const int N = c.get<int>("N", 64);
  const int cases = c.get<int>("cases", 3);
  const int n = c.get<int>("size", 4);
  std::mt19937_64 rng(c.seed);
  const SmoothFunction f = circle_friendly(c.get<double>("u_end", 0.8));

  for (int i = 0; i < cases; ++i) {
    const Operator p(symmetric_with_spectrum(uniform_spectrum(n, -2.0, 2.0, rng), rng));
    const Operator b = cayley(p);
    auto t0 = Clock::now();
    const calculus::CircleResult circ = calculus::apply_circle(calculus::circle_pullback(f), b, N);
    const double rc = since(t0);
    const CalculusResult line = calculus::apply_single(f, p, opt);
    const Matrix ref = eigen_oracle(real_arg(f), p);
    Check& ch = add_check(r, "line_vs_circle/" + idx(i), norm2(circ.value - line.value), c.tolerance("cayley", 1e-5),
                          mat(circ.value), mat(line.value));
    ch.runtime = rc;
    ch.nodes = line.node_count;
    ch.computed = {{"value", mat(circ.value)}, {"tail_bound", circ.tail_bound}};
    add_check(r, "circle_vs_oracle/" + idx(i), norm2(circ.value - ref), c.tolerance("cayley", 1e-5), mat(circ.value),
              mat(ref));
    add_check(r, "roundtrip/" + idx(i), norm2(inverse_cayley(b).matrix() - p.matrix()) / p.scale(),
              c.tolerance("roundtrip", 1e-10));
    if (i == 0) {
      const auto w = calculus::apply_circle([](double th) { return std::polar(1.0, th); }, b, N);
      add_check(r, "identity_w", norm2(w.value - b.matrix()), c.tolerance("sanity", 1e-12), mat(w.value));
      const auto one = calculus::apply_circle([](double) { return cplx(1.0); }, b, N);
      add_check(r, "constant_one", norm2(one.value - Matrix::Identity(n, n)), c.tolerance("sanity", 1e-12),
                mat(one.value));
    }
  }
  return r;
}

// ---------------------------------------------------------------- recovery

Report run_recovery(const ExperimentConfig& c) {
  Report r = start("recover", c);
  const CalculusOptions opt = c.options();
  std::mt19937_64 rng(c.seed);
  const cplx z = c.params.contains("z") ? io::complex_from_json(c.params.at("z")) : I;
  const cplx z2 = c.params.contains("z_alt") ? io::complex_from_json(c.params.at("z_alt")) : cplx(2.0, 3.0);
  constexpr double loose = 1e300;  // dependence is reported as a check, not thrown

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  if (c.params.contains("operator")) d = load_matrix(c.params.at("operator"));
  auto t0 = Clock::now();
  const auto he = calculus::CalculusHomomorphism::from_operator(Operator(d), EPath::exact, opt);
  const calculus::Recovery re = calculus::recover_generator(he, z, z2, loose);
  Check& ce = add_check(r, "exact", norm2(re.generator - d), c.tolerance("exact", 1e-10), mat(re.generator), mat(d));
  ce.runtime = since(t0);
  add_check(r, "z_independence/exact", re.z_independence, c.tolerance("z_independence", 1e-8), re.z_independence);

  const Matrix s = symmetric_with_spectrum(uniform_spectrum(3, -1.0, 1.0, rng), rng);
  t0 = Clock::now();
  const auto hi = calculus::CalculusHomomorphism::from_operator(Operator(s), EPath::integral, opt);
  const calculus::Recovery ri = calculus::recover_generator(hi, z, z2, loose);
  Check& ci = add_check(r, "integral", norm2(ri.generator - s), c.tolerance("integral", 1e-5), mat(ri.generator), mat(s));
  ci.runtime = since(t0);
  add_check(r, "z_independence/integral", ri.z_independence, c.tolerance("z_independence_integral", 1e-6),
            ri.z_independence);

  // an externally supplied homomorphism: functions of a non-normal matrix through its eigenbasis
  const Matrix g = diagonalizable({-0.5, 0.25, 1.5}, rng);
  const Operator op(g);
  const calculus::CalculusHomomorphism hx([op](const EFunction& f) { return eigen_oracle([&](cplx x) { return f(x.real()); }, op); },
                                          3, "external:eigenbasis");
  const calculus::Recovery rx = calculus::recover_generator(hx, z, z2, loose);
  add_check(r, "external", norm2(rx.generator - g) / op.scale(), c.tolerance("external", 1e-10), mat(rx.generator),
            mat(g));

  // a degenerate Op (rank one everywhere) must be refused
  bool refused = false;
  try {
    const calculus::CalculusHomomorphism bad([](const EFunction& f) {
      Matrix m = Matrix::Zero(2, 2);
      m(0, 0) = f(0.0);
      return m;
    }, 2, "external:degenerate");
    (void)bad;
  } catch (const SingularityError&) {
    refused = true;
  }
  add_check(r, "singular_refused", refused ? 0.0 : 1.0, 0.0, refused);
  return r;
}

// ---------------------------------------------------------------- composition

Report run_composition(const ExperimentConfig& c) {
  Report r = start("compose", c);
  CalculusOptions opt = c.options();
  // g o f is tabulated over a long support with a steep edge: far fewer nodes with the strip extension
  if (!c.params.contains("method")) opt.extension.method = ahx::Method::taylor;
  const int cases = c.get<int>("cases", 2);
  std::mt19937_64 rng(c.seed);
  const EFunction f = c.params.contains("function") ? io::efunction_from_json(c.params.at("function"))
                                                    : add_E(EFunction::omega(I), EFunction::omega(-I));
  const SmoothFunction g = c.params.contains("outer") ? io::smooth_from_json(c.params.at("outer")) : unit_bump(0.6, 0.3);
  const ScalarFn gf = [&](cplx x) { return g(f(x.real()).real()); };

  for (int i = 0; i < cases; ++i) {
    // Hermitian: normal with real spectrum; one eigenvalue lands where g o f is large
    auto e = uniform_spectrum(4, -3.0, 3.0, rng);
    e[0] = -0.5 - 0.3 * uniform(rng, 0.0, 1.0);
    Vector dv(4);
    for (int k = 0; k < 4; ++k) dv(k) = e[static_cast<std::size_t>(k)];
    const Matrix u = random_unitary(4, rng);
    const Operator p(Matrix(u * dv.asDiagonal() * u.adjoint()));
    const auto t0 = Clock::now();
    const calculus::Composition cc = calculus::compose_calculus(g, f, p, opt);
    const double rt = since(t0);
    const Matrix ref = eigen_oracle(gf, p);
    Check& ch = add_check(r, "lhs_vs_rhs/" + idx(i), norm2(cc.lhs - cc.rhs), c.tolerance("compose", 1e-4), mat(cc.lhs),
                          mat(cc.rhs));
    ch.runtime = rt;
    ch.nodes = cc.lhs_result.node_count + cc.rhs_result.node_count;
    add_check(r, "lhs_vs_oracle/" + idx(i), norm2(cc.lhs - ref), c.tolerance("compose", 1e-4), mat(cc.lhs), mat(ref));
    add_check(r, "rhs_vs_oracle/" + idx(i), norm2(cc.rhs - ref), c.tolerance("compose", 1e-4), mat(cc.rhs), mat(ref));
  }

  const Operator p0(symmetric_with_spectrum({-1.0, 0.5}, rng));
  const calculus::Composition z = calculus::compose_calculus(SmoothFunction::zero(), f, p0, opt);
  add_check(r, "g_zero", norm2(z.lhs) + norm2(z.rhs), 0.0);

  if (c.get<bool>("non_normal", true)) {
    // no oracle claim for a non-normal P: the two sides are compared with each other
    const Operator pn(diagonalizable({-0.6, 0.8, 2.0}, rng));
    const auto t0 = Clock::now();
    const calculus::Composition cc = calculus::compose_calculus(g, f, pn, opt);
    Check& ch = add_check(r, "non_normal", norm2(cc.lhs - cc.rhs), c.tolerance("compose", 1e-4), mat(cc.lhs),
                          mat(cc.rhs));
    ch.runtime = since(t0);
    ch.mode = "consistency-only";
  }
  return r;
}

// ---------------------------------------------------------------- support scan

Report run_support_scan(const ExperimentConfig& c) {
  Report r = start("support-scan", c);
  const CalculusOptions opt = c.options();
  std::mt19937_64 rng(c.seed);
  const std::string pair = c.get<std::string>("pair", "commuting");
  const double hw = c.get<double>("halfwidth", 0.4);

  std::vector<Matrix> ops;
  std::vector<double> la, lb;
  double threshold;
  std::set<std::pair<double, double>> expect;
  if (pair == "commuting") {
    const Matrix q = symmetric_with_spectrum({0.0, 1.0}, rng);  // only the basis is used
    Eigen::SelfAdjointEigenSolver<Matrix> es(q);
    const Matrix v = es.eigenvectors();
    Vector d1(2), d2(2);
    d1 << 0.0, 1.0;
    d2 << 2.0, 3.0;
    ops = {v * d1.asDiagonal() * v.adjoint(), v * d2.asDiagonal() * v.adjoint()};
    la = c.get<std::vector<double>>("lattice_a", {-0.5, 0.0, 0.5, 1.0, 1.5});
    lb = c.get<std::vector<double>>("lattice_b", {1.5, 2.0, 2.5, 3.0, 3.5});
    threshold = c.get<double>("peak_threshold", 0.5);
  } else if (pair == "example4") {
    const auto [a, ae] = example_pair(c.get<double>("eps", 0.1));
    ops = {a, ae};
    la = lb = c.get<std::vector<double>>("lattice", {-0.5, 0.0, 0.5, 1.0, 1.5});
    threshold = c.get<double>("peak_threshold", 0.05);
    expect = {{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}};
  } else if (pair == "custom") {
    ops = load_matrices(c.params.at("operators"));
    la = c.params.at("lattice_a").get<std::vector<double>>();
    lb = c.params.at("lattice_b").get<std::vector<double>>();
    threshold = c.get<double>("peak_threshold", 0.5);
  } else {
    throw DomainError("support-scan: unknown pair '" + pair + "'");
  }
  if (ops.size() != 2) throw DomainError("support-scan: needs two operators");
  const OperatorTuple t = tuple_of(ops);
  const bool commuting = is_commuting(t);
  if (pair != "example4") {
    if (!commuting) throw DomainError("support-scan: expected peaks are only known for commuting pairs");
    // each joint point is matched to its nearest lattice cell
    for (const auto& pt : joint_spectrum(t)) {
      auto near = [](const std::vector<double>& l, double v) {
        return *std::min_element(l.begin(), l.end(), [&](double a, double b) { return std::abs(a - v) < std::abs(b - v); });
      };
      expect.insert({near(la, pt[0].real()), near(lb, pt[1].real())});
    }
  }

  Table heat{"heatmap", {"a", "b", "norm", "error_estimate"}, {}};
  double floor = 0.0;
  int mismatches = 0;
  long nodes = 0;
  const auto t0 = Clock::now();
  std::set<std::pair<double, double>> found;
  for (const double a : la)
    for (const double b : lb) {
      const CalculusResult res = calculus::apply_multi(tensorize({unit_bump(a, hw), unit_bump(b, hw)}), t, opt);
      const double nv = norm2(res.value);
      nodes += res.node_count;
      heat.rows.push_back({a, b, nv, res.error_estimate});
      const bool peak = nv >= threshold;
      if (peak) found.insert({a, b});
      if (peak != static_cast<bool>(expect.count({a, b}))) ++mismatches;
      if (!expect.count({a, b})) floor = std::max(floor, nv);
    }
  json ex = json::array(), fd = json::array();
  for (const auto& [a, b] : expect) ex.push_back({a, b});
  for (const auto& [a, b] : found) fd.push_back({a, b});
  Check& cp = add_check(r, "peaks", mismatches, 0.0, fd, ex);
  cp.runtime = since(t0);
  cp.nodes = nodes;
  add_check(r, "floor", floor, c.tolerance("floor", 1e-6), floor);
  r.tables.push_back(std::move(heat));
  if (pair != "commuting") return r;

  // product law on the commuting pair
  const TensorFunction f({{1.0, {unit_bump(0.0, 0.6), unit_bump(2.0, 0.6)}},
                          {0.5, {unit_bump(1.0, 0.6), unit_bump(3.0, 0.7)}}});
  const TensorFunction g({{cplx(0.3, 0.4), {SmoothFunction::plateau(-0.3, 1.3, 0.3), unit_bump(2.2, 1.2)}}});
  auto t1 = Clock::now();
  const CalculusResult fg = calculus::apply_multi(f * g, t, opt);
  const Matrix rhs = calculus::apply_multi(f, t, opt).value * calculus::apply_multi(g, t, opt).value;
  Check& cl = add_check(r, "product_law", norm2(fg.value - rhs), c.tolerance("product_law", 1e-5), mat(fg.value),
                        mat(rhs));
  cl.runtime = since(t1);
  cl.nodes = fg.node_count;

  // polynomial map of a commuting triple: joint spectrum maps pointwise
  {
    const Matrix v = random_unitary(3, rng);
    auto diag = [&](std::vector<double> e) {
      Vector d(3);
      for (int k = 0; k < 3; ++k) d(k) = e[static_cast<std::size_t>(k)];
      return Matrix(v * d.asDiagonal() * v.adjoint());
    };
    const Matrix x = diag({0.0, 1.0, -0.5}), y = diag({2.0, 3.0, 0.5});
    const Matrix p1 = x + 2.0 * y, p2 = x * y - x * x;
    const auto src = joint_spectrum(OperatorTuple({Operator(x), Operator(y)}, false));
    const auto img = joint_spectrum(OperatorTuple({Operator(p1), Operator(p2)}, false));
    double h = 0.0;
    auto dist = [](const std::vector<cplx>& a, const std::vector<cplx>& b) {
      return std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
    };
    std::vector<std::vector<cplx>> mapped;
    for (const auto& s : src) mapped.push_back({s[0] + 2.0 * s[1], s[0] * s[1] - s[0] * s[0]});
    auto hausdorff = [&](const auto& from, const auto& to) {
      for (const auto& a : from) {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& b : to) m = std::min(m, dist(a, b));
        h = std::max(h, m);
      }
    };
    hausdorff(mapped, img);
    hausdorff(img, mapped);
    if (mapped.size() != img.size()) h = std::max(h, 1.0);
    add_check(r, "joint_spectral_mapping", h, c.tolerance("joint_spectral_mapping", 1e-8), static_cast<double>(img.size()),
              static_cast<double>(mapped.size()));
  }

  // containment for a non-commuting pair: bumps off sigma(P1) x sigma(P2) give zero
  {
    const OperatorTuple nc({Operator(symmetric_with_spectrum(uniform_spectrum(3, -1.0, 1.0, rng), rng)),
                            Operator(symmetric_with_spectrum(uniform_spectrum(3, -1.0, 1.0, rng), rng))});
    double worst = 0.0;
    for (const auto& [a, b] : std::vector<std::pair<double, double>>{{3.0, 0.0}, {0.0, -3.0}, {2.5, 2.5}})
      worst = std::max(worst, norm2(calculus::apply_multi(tensorize({unit_bump(a, 1.0), unit_bump(b, 1.0)}), nc, opt).value));
    add_check(r, "containment", worst, c.tolerance("floor", 1e-6), worst);
  }
  return r;
}

// ---------------------------------------------------------------- convergence

Report run_convergence(const ExperimentConfig& c) {
  Report r = start("convergence", c);
  const CalculusOptions opt = c.options();
  const quad::QuadratureSpec base = opt.spec.value_or(quad::QuadratureSpec::single_default());
  const auto parts = parts_of(c, {"decay", "cauchy_green", "curves", "determinism", "honesty"});
  std::mt19937_64 rng(c.seed);

  if (has(parts, "decay")) {
    const SmoothFunction f = SmoothFunction::bump(0.0, c.get<double>("decay_halfwidth", 2.0));
    std::vector<double> ys;
    for (int k = 4; k <= 9; ++k) ys.push_back(std::ldexp(1.0, -k));
    Table tab{"decay", {"method", "y", "sup_dbar"}, {}};
    ahx::ExtensionOptions eo;
    eo.taylor.order = 8;
    for (const ahx::Method m : {ahx::Method::fourier, ahx::Method::taylor}) {
      eo.method = m;
      const auto t0 = Clock::now();
      const auto rows = ahx::dbar_decay(*ahx::extend(f, eo), ys);
      for (const auto& row : rows) tab.rows.push_back({static_cast<double>(m), row.y, row.sup_dbar});
      at_least(r, "decay/" + ahx::to_string(m), ahx::decay_slope(rows), 4.0).runtime = since(t0);
    }
    r.tables.push_back(std::move(tab));
  }

  auto cauchy_green = [&](const ahx::Extension1D& e, cplx w0, const quad::QuadratureSpec& s, double* est, long* nodes) {
    const quad::PlaneIntegral pi_ = quad::integrate_plane(e, quad::CauchyKernelField(w0), s);
    if (est) *est = pi_.error_estimate / pi + pi_.neglected;
    if (nodes) *nodes = pi_.node_count;
    return cplx(-pi_.value(0, 0) / pi);
  };

  if (has(parts, "cauchy_green")) {
    const SmoothFunction f = SmoothFunction::bump(0.1, 0.9);
    for (const ahx::Method m : {ahx::Method::fourier, ahx::Method::taylor}) {
      ahx::ExtensionOptions eo;
      eo.method = m;
      const auto e = ahx::extend(f, eo);
      int k = 0;
      for (const cplx w0 : {cplx(0.0, 0.0), cplx(0.5, 0.3), cplx(-0.4, -0.2), cplx(0.8, 0.05), cplx(3.0, 1.0)}) {
        const auto t0 = Clock::now();
        double est = 0.0;
        long nodes = 0;
        const cplx v = cauchy_green(*e, w0, base, &est, &nodes);
        Check& ch = add_check(r, "cauchy_green/" + ahx::to_string(m) + "/" + idx(k++), std::abs(v - e->value(w0)),
                              c.tolerance("cauchy_green", 1e-6), io::complex_to_json(v), io::complex_to_json(e->value(w0)));
        ch.runtime = since(t0);
        ch.nodes = nodes;
      }
    }
  }

  if (has(parts, "curves")) {
    const int levels = c.get<int>("levels", 2);
    Table tab{"curves", {"curve", "level", "nodes", "error", "error_estimate"}, {}};
    // Cauchy-Green at one point
    {
      const auto e = ahx::extend(SmoothFunction::bump(0.1, 0.9), opt.extension);
      const cplx w0(0.5, 0.3);
      std::vector<double> le, ln;
      quad::QuadratureSpec s = base;
      for (int level = 0; level < levels; ++level, s = s.refined()) {
        double est = 0.0;
        long nodes = 0;
        const double err = std::abs(cauchy_green(*e, w0, s, &est, &nodes) - e->value(w0));
        tab.rows.push_back({0, static_cast<double>(level), static_cast<double>(nodes), err, est});
        le.push_back(std::log(err));
        ln.push_back(0.5 * std::log(static_cast<double>(nodes)));  // panels per direction
      }
      at_least(r, "convergence_slope/cauchy_green", -ls_slope(ln, le), 4.0);
    }
    // scalar and eigen oracles along the same levels
    const Operator p1(Matrix::Constant(1, 1, 0.35));
    const Operator p6(symmetric_with_spectrum(uniform_spectrum(6, -1.5, 1.5, rng), rng));
    const SmoothFunction f = SmoothFunction::bump(0.0, 1.1);
    int curve = 1;
    for (const Operator* p : {&p1, &p6}) {
      const Matrix ref = eigen_oracle(real_arg(f), *p);
      quad::QuadratureSpec s = base;
      double last = 0.0;
      for (int level = 0; level < levels; ++level, s = s.refined()) {
        CalculusOptions o = opt;
        o.spec = s;
        const CalculusResult res = calculus::apply_single(f, *p, o);
        last = norm2(res.value - ref);
        tab.rows.push_back({static_cast<double>(curve), static_cast<double>(level), static_cast<double>(res.node_count),
                            last, res.error_estimate});
      }
      add_check(r, std::string("curve_final/") + (curve == 1 ? "scalar" : "eigen"), last, c.tolerance("curve", 1e-6),
                last);
      ++curve;
    }
    // m = 2 on a commuting pair
    {
      const Matrix v = random_unitary(3, rng);
      auto diag = [&](double a, double b, double cc) {
        Vector d(3);
        d << a, b, cc;
        return Matrix(v * d.asDiagonal() * v.adjoint());
      };
      const OperatorTuple t({Operator(diag(0.0, 0.5, -0.4)), Operator(diag(1.0, 0.7, 1.2))});
      const TensorFunction g = tensorize({unit_bump(0.1, 0.8), unit_bump(0.9, 0.7)});
      const Matrix ref = eigen_oracle([&](const std::vector<cplx>& x) {
        const double xr[2] = {x[0].real(), x[1].real()};
        return g(xr);
      }, t);
      quad::QuadratureSpec s = opt.spec.value_or(quad::QuadratureSpec::multi_default());
      double last = 0.0;
      for (int level = 0; level < levels; ++level, s = s.refined()) {
        CalculusOptions o = opt;
        o.spec = s;
        const CalculusResult res = calculus::apply_multi(g, t, o);
        last = norm2(res.value - ref);
        tab.rows.push_back({3, static_cast<double>(level), static_cast<double>(res.node_count), last, res.error_estimate});
      }
      add_check(r, "curve_final/multi", last, c.tolerance("curve_multi", 1e-5), last);
    }
    // the zero integrand stays exactly zero
    {
      const CalculusResult z = calculus::apply_single(SmoothFunction::zero(), p6, opt);
      add_check(r, "zero_integrand", norm2(z.value) + z.error_estimate, 0.0, norm2(z.value));
      tab.rows.push_back({4, 0, static_cast<double>(z.node_count), norm2(z.value), z.error_estimate});
    }
    r.tables.push_back(std::move(tab));
  }

  if (has(parts, "determinism")) {
    const Operator p(symmetric_with_spectrum(uniform_spectrum(6, -1.5, 1.5, rng), rng));
    const SmoothFunction f = SmoothFunction::bump(0.2, 1.2);
    const Matrix a = calculus::apply_single(f, p, opt).value;
    const Matrix b = calculus::apply_single(f, p, opt).value;
    CalculusOptions o3 = opt;
    quad::QuadratureSpec s = base;
    s.threads = 3;
    o3.spec = s;
    const Matrix d = calculus::apply_single(f, p, o3).value;
    const bool same = std::memcmp(a.data(), b.data(), sizeof(cplx) * a.size()) == 0 &&
                      std::memcmp(a.data(), d.data(), sizeof(cplx) * a.size()) == 0;
    add_check(r, "bit_identical", same ? 0.0 : std::max((a - b).cwiseAbs().maxCoeff(), (a - d).cwiseAbs().maxCoeff()) + 1e-300,
              0.0, same);
  }

  if (has(parts, "honesty")) {
    const int cases = c.get<int>("honesty_cases", 20);
    Table tab{"honesty", {"case", "n", "method", "error", "error_estimate"}, {}};
    int honest = 0;
    for (int i = 0; i < cases; ++i) {
      const int n = i % 2 == 0 ? 1 : 4;
      const ahx::Method m = (i / 2) % 2 == 0 ? ahx::Method::fourier : ahx::Method::taylor;
      const double ctr = uniform(rng, -0.5, 0.5), hw = uniform(rng, 0.6, 1.4);
      const SmoothFunction f = SmoothFunction::bump(ctr, hw);
      const Operator p = n == 1 ? Operator(Matrix::Constant(1, 1, ctr + hw * uniform(rng, -0.9, 0.9)))
                                : Operator(symmetric_with_spectrum(uniform_spectrum(n, -1.5, 1.5, rng), rng));
      const CalculusResult res = calculus::apply_single(f, p, with_method(opt, m));
      const double err = norm2(res.value - eigen_oracle(real_arg(f), p));
      honest += err <= 10.0 * res.error_estimate;
      tab.rows.push_back({static_cast<double>(i), static_cast<double>(n), static_cast<double>(m), err, res.error_estimate});
    }
    const double frac = static_cast<double>(honest) / cases;
    at_least(r, "honest_estimates", frac, 0.95);
    r.tables.push_back(std::move(tab));
  }
  return r;
}

// ---------------------------------------------------------------- dispatch

std::vector<std::string> verbs() {
  return {"apply", "oracle-suite", "perturb", "commutator", "cayley", "recover", "compose", "support-scan", "convergence"};
}

Report run(const std::string& verb, const ExperimentConfig& c) {
  static const std::map<std::string, Report (*)(const ExperimentConfig&)> table = {
      {"apply", run_apply},         {"oracle-suite", run_oracle_suite}, {"perturb", run_perturbation},
      {"commutator", run_commutator_bound}, {"cayley", run_cayley_check}, {"recover", run_recovery},
      {"compose", run_composition}, {"support-scan", run_support_scan}, {"convergence", run_convergence}};
  const auto it = table.find(verb);
  if (it == table.end()) throw DomainError("unknown experiment '" + verb + "'");
  ExperimentConfig cc = c;
  cc.experiment = verb;
  Report r = it->second(cc);
  if (!cc.out_dir.empty()) write_report(r, cc.out_dir);
  return r;
}

}  // namespace fcalc::xlab
