#include "fcalc/calculus/calculus.hpp"

#include "fcalc/funcalg/json_io.hpp"
#include "fcalc/linop/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fcalc::calculus {

namespace {

quad::PlaneIntegral scaled(quad::PlaneIntegral r, double c) {
  r.value *= c;
  r.coarse *= c;
  r.error_estimate *= std::abs(c);
  for (auto& t : r.trace) t.error_estimate *= std::abs(c);
  return r;
}

quad::PlaneIntegral run(const quad::QuadTask& task, const quad::QuadratureSpec& spec, const CalculusOptions& opt) {
  if (!opt.refine) {
    quad::PlaneIntegral r = task(spec);
    r.trace = {{0, r.node_count, r.error_estimate}};
    return r;
  }
  return quad::refine_until(task, spec, opt.tolerance, opt.budget);
}

CalculusResult finish(quad::PlaneIntegral r, ahx::Method method) {
  CalculusResult out;
  out.value = std::move(r.value);
  out.neglected = r.neglected;
  out.error_estimate = r.error_estimate + r.neglected;
  out.method = method;
  out.spec = r.spec;
  out.node_count = r.node_count;
  out.trace = std::move(r.trace);
  out.diagnostics["layers"] = r.layers;
  out.diagnostics["skipped_layers"] = r.skipped_layers;
  out.diagnostics["neglected"] = r.neglected;
  return out;
}

nlohmann::json growth_json(const GrowthProfile& g) {
  return {{"C", g.C}, {"N", g.N}, {"residual", g.residual}};
}

void check_decay(const ahx::Extension1D& e, const GrowthProfile& g) {
  if (!(e.decay_order() > g.N))
    throw DomainError("calculus: extension decay order " + std::to_string(e.decay_order()) +
                      " does not beat the resolvent growth order " + std::to_string(g.N));
}

const GrowthProfile& profile_of(const OperatorTuple& t, std::size_t j, std::vector<GrowthProfile>& scratch) {
  if (t.profiles().size() == t.size()) return t.profiles()[j];
  if (scratch.empty())
    for (const Operator& p : t.operators()) scratch.push_back(fit_growth(p));
  return scratch[j];
}

void check_tuple(const OperatorTuple& t) {
  if (t.size() == 0 || t.size() > 3) throw DomainError("calculus: need 1 <= m <= 3 operators");
  for (std::size_t j = 0; j < t.size(); ++j) {
    const SpectrumCertificate c =
        j < t.certificates().size() ? t.certificates()[j] : certify_real_spectrum(t[j]);
    if (!c.real) throw SpectrumError("calculus: operator " + std::to_string(j) + " has non-real spectrum", c.worst);
  }
}

// Resolvent of P times a fixed matrix on the right: the coefficient of a
// matrix-valued extension kept to the right of the resolvent.
class RightFactorField final : public quad::MatrixField {
 public:
  RightFactorField(const quad::ResolventField& r, Matrix right) : r_(r), right_(std::move(right)) {}
  Index dim() const override { return r_.dim(); }
  void accumulate(std::span<const cplx> z, std::span<const cplx> w, Matrix& acc) const override {
    r_.accumulate(z, w, acc);
  }
  Matrix finalize(const Matrix& acc) const override { return r_.finalize(acc) * right_; }
  double norm_integral_bound(double x0, double x1, double y0, double y1) const override {
    return r_.norm_integral_bound(x0, x1, y0, y1) * norm2(right_);
  }

 private:
  const quad::ResolventField& r_;
  Matrix right_;
};

CalculusResult multi_impl(const TensorFunction& f, const OperatorTuple& t, const std::vector<int>& order,
                          const CalculusOptions& opt) {
  check_tuple(t);
  const std::size_t m = t.size();
  if (static_cast<std::size_t>(f.arity()) != m && !f.terms().empty())
    throw DomainError("calculus: function arity does not match the tuple");
  const Index n = t.dim();
  if (f.terms().empty()) {
    CalculusResult z;
    z.value = Matrix::Zero(n, n);
    return z;
  }
  const ahx::ExtensionMD e = ahx::extend_md(f, opt.extension);
  std::vector<GrowthProfile> scratch;
  std::vector<quad::ResolventField> fields;
  fields.reserve(m);
  for (std::size_t j = 0; j < m; ++j) fields.emplace_back(t[j], profile_of(t, j, scratch));
  for (const auto& term : e.terms())
    for (std::size_t j = 0; j < m; ++j) check_decay(*term.factors[j], profile_of(t, j, scratch));

  std::vector<quad::MultiTerm> terms;
  for (const auto& term : e.terms()) {
    quad::MultiTerm mt{term.weight, {}};
    for (const auto& fac : term.factors) mt.factors.push_back(fac.get());
    terms.push_back(std::move(mt));
  }
  std::vector<const quad::MatrixField*> ms;
  for (const auto& fl : fields) ms.push_back(&fl);
  const double c = std::pow(-1.0 / pi, static_cast<double>(m));
  const quad::QuadTask task = [&](const quad::QuadratureSpec& s) {
    return scaled(quad::integrate_multi(terms, ms, order, {s}), c);
  };
  const quad::QuadratureSpec spec =
      opt.spec ? *opt.spec : (m == 1 ? quad::QuadratureSpec::single_default() : quad::QuadratureSpec::multi_default());
  CalculusResult out = finish(run(task, spec, opt), opt.extension.method);
  nlohmann::json g = nlohmann::json::array();
  for (std::size_t j = 0; j < m; ++j) g.push_back(growth_json(profile_of(t, j, scratch)));
  out.diagnostics["growth"] = g;
  out.diagnostics["order"] = order;
  out.diagnostics["terms"] = terms.size();
  return out;
}

}  // namespace

CalculusResult apply_single(const SmoothFunction& f, const Operator& p, const CalculusOptions& opt) {
  assert_real_spectrum(p);
  const GrowthProfile growth = fit_growth(p);
  const ahx::Extension1DPtr e = ahx::extend(f, opt.extension);
  check_decay(*e, growth);
  const quad::ResolventField field(p, growth);
  const quad::QuadTask task = [&](const quad::QuadratureSpec& s) {
    return scaled(quad::integrate_plane(*e, field, s), -1.0 / pi);
  };
  CalculusResult out = finish(run(task, opt.spec.value_or(quad::QuadratureSpec::single_default()), opt),
                              opt.extension.method);
  out.diagnostics["growth"] = growth_json(growth);
  out.diagnostics["extension"] = e->diagnostics();
  out.diagnostics["restriction_error"] = e->restriction_error();
  return out;
}

CalculusResult apply_multi(const TensorFunction& f, const OperatorTuple& t, const CalculusOptions& opt) {
  std::vector<int> order(t.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
  return multi_impl(f, t, order, opt);
}

CalculusResult apply_ordered(const TensorFunction& f, const OperatorTuple& t, const std::vector<int>& order,
                             const CalculusOptions& opt) {
  return multi_impl(f, t, order, opt);
}

CalculusResult apply_iterated(const TensorFunction& f, const OperatorTuple& t, const CalculusOptions& opt,
                              const Matrix* middle) {
  check_tuple(t);
  if (t.size() != 2 || f.arity() != 2) throw DomainError("apply_iterated: needs m = 2");
  const Index n = t.dim();
  const Matrix mid = middle ? *middle : Matrix::Identity(n, n);
  if (mid.rows() != n || mid.cols() != n) throw DomainError("apply_iterated: middle factor has the wrong shape");

  // inner pass: each second-variable factor applied to P2 once
  std::map<const SmoothNode*, CalculusResult> inner;
  // outer grouping: g(x1) = sum over outer factors phi of phi(x1) * C_phi
  struct Group {
    SmoothFunction phi;
    Matrix coef;
    double coef_err = 0.0;
  };
  std::map<const SmoothNode*, Group> groups;
  std::vector<const SmoothNode*> group_order;
  for (const TensorTerm& term : f.terms()) {
    const SmoothFunction& psi = term.factors[1];
    auto it = inner.find(&psi.node());
    if (it == inner.end()) it = inner.emplace(&psi.node(), apply_single(psi, t[1], opt)).first;
    const Matrix c = term.weight * (mid * it->second.value);
    const double ce = std::abs(term.weight) * norm2(mid) * it->second.error_estimate;
    const SmoothFunction& phi = term.factors[0];
    auto g = groups.find(&phi.node());
    if (g == groups.end()) {
      g = groups.emplace(&phi.node(), Group{phi, Matrix::Zero(n, n), 0.0}).first;
      group_order.push_back(&phi.node());
    }
    g->second.coef += c;
    g->second.coef_err += ce;
  }

  // outer pass with the matrix coefficient to the right of the resolvent
  const GrowthProfile growth = t.profiles().size() == 2 ? t.profiles()[0] : fit_growth(t[0]);
  const quad::ResolventField r1(t[0], growth);
  const quad::QuadratureSpec spec = opt.spec.value_or(quad::QuadratureSpec::single_default());
  CalculusResult out;
  out.value = Matrix::Zero(n, n);
  out.method = opt.extension.method;
  out.spec = spec;
  quad::PairwiseSum sum;
  double err = 0.0, negl = 0.0;
  for (const SmoothNode* key : group_order) {
    const Group& g = groups.at(key);
    const ahx::Extension1DPtr e = ahx::extend(g.phi, opt.extension);
    check_decay(*e, growth);
    const RightFactorField field(r1, g.coef);
    const quad::QuadTask task = [&](const quad::QuadratureSpec& s) {
      return scaled(quad::integrate_plane(*e, field, s), -1.0 / pi);
    };
    const quad::PlaneIntegral r = run(task, spec, opt);
    sum.add(r.value);
    // the outer factor alone has norm about ||value|| / ||coef||; propagate the inner errors through it
    const double cn = norm2(g.coef);
    err += r.error_estimate + r.neglected + (cn > 0.0 ? norm2(r.value) / cn : 1.0) * g.coef_err;
    negl += r.neglected;
    out.node_count += r.node_count;
  }
  for (const auto& [k, v] : inner) out.node_count += v.node_count;
  out.value = sum.result(n, n);
  out.error_estimate = err;
  out.neglected = negl;
  out.diagnostics["outer_groups"] = group_order.size();
  out.diagnostics["inner_evaluations"] = inner.size();
  out.diagnostics["growth"] = growth_json(growth);
  return out;
}

CalculusResult apply_E(const EFunction& f, const Operator& p, EPath path, const CalculusOptions& opt) {
  assert_real_spectrum(p);
  const Index n = p.dim();
  CalculusResult out;
  out.method = path == EPath::exact ? ahx::Method::pole_exact : opt.extension.method;
  out.value = f.a0() * Matrix::Identity(n, n);
  if (!f.compact_part().is_zero()) {
    CalculusResult c = apply_single(f.compact_part(), p, opt);
    out.value += c.value;
    out.error_estimate += c.error_estimate;
    out.neglected += c.neglected;
    out.node_count += c.node_count;
    out.spec = c.spec;
    out.diagnostics["compact"] = c.diagnostics;
  }
  nlohmann::json poles = nlohmann::json::array();
  if (path == EPath::exact) {
    for (const PoleTerm& t : f.poles()) {
      const Matrix r = p.resolvent(t.zeta);
      Matrix rk = r;
      for (int k = 1; k < t.order; ++k) rk = rk * r;
      out.value += t.coeff * rk;
    }
  } else {
    const quad::ResolventField field(p);
    for (const PoleTerm& t : f.poles()) {
      const auto e = ahx::extend_pole(t);
      quad::AnnulusRule rule;
      rule.center = t.zeta;
      rule.r_in = 0.5 * e->radius();
      rule.r_out = e->radius();
      const quad::PlaneIntegral r = quad::integrate_annulus([&](cplx z) { return e->dbar(z); }, field, rule);
      out.value += (-1.0 / pi) * r.value;
      out.error_estimate += r.error_estimate / pi;
      out.node_count += r.node_count;
      poles.push_back({{"zeta", io::complex_to_json(t.zeta)}, {"order", t.order}, {"error_estimate", r.error_estimate / pi}});
    }
  }
  out.diagnostics["path"] = path == EPath::exact ? "exact" : "integral";
  out.diagnostics["poles"] = poles;
  return out;
}

CircleResult apply_circle(const CircleFn& g, const Operator& b, int N, double circle_tol) {
  if (N < 1) throw DomainError("apply_circle: need N >= 1");
  const Vector ev = b.eigenvalues();
  for (Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) == 0.0) throw SpectrumError("apply_circle: 0 is in the spectrum", ev(i));
    if (std::abs(std::abs(ev(i)) - 1.0) > circle_tol)
      throw SpectrumError("apply_circle: spectrum off the unit circle", ev(i));
  }
  const int M = 4 * N;
  std::vector<cplx> samples(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) samples[j] = g(2.0 * pi * j / M);
  auto coef = [&](int nidx) {
    cplx s = 0.0;
    for (int j = 0; j < M; ++j) s += samples[j] * std::polar(1.0, -2.0 * pi * static_cast<double>((static_cast<long>(nidx) * j) % M) / M);
    return s / static_cast<double>(M);
  };
  const Index n = b.dim();
  const Matrix binv = b.matrix().partialPivLu().inverse();
  CircleResult out;
  out.N = N;
  out.value = Matrix::Zero(n, n);
  Matrix pos = Matrix::Identity(n, n), neg = Matrix::Identity(n, n);
  for (int k = 0; k <= 2 * N; ++k) {
    const cplx cp = coef(k), cn = k == 0 ? cplx(0.0) : coef(-k);
    if (k <= N) {
      out.value += cp * pos;
      if (k > 0) out.value += cn * neg;
    } else {
      out.tail_bound += std::abs(cp) * norm2(pos) + std::abs(cn) * norm2(neg);
    }
    pos = pos * b.matrix();
    neg = neg * binv;
  }
  out.coefficients.resize(static_cast<std::size_t>(2 * N + 1));
  for (int k = -N; k <= N; ++k) out.coefficients[static_cast<std::size_t>(k + N)] = coef(k);
  return out;
}

CircleFn circle_pullback(const SmoothFunction& f) {
  return [f](double theta) -> cplx {
    const double s = std::sin(0.5 * theta);
    if (s == 0.0) return 0.0;
    return f(std::cos(0.5 * theta) / s);
  };
}

CalculusHomomorphism::CalculusHomomorphism(Eval eval, Index dim, std::string provenance, double mult_tol,
                                           std::uint64_t seed)
    : eval_(std::move(eval)), dim_(dim), provenance_(std::move(provenance)) {
  const Matrix ri = eval_(EFunction::omega(I));
  if (ri.rows() != dim_ || ri.cols() != dim_) throw DomainError("CalculusHomomorphism: wrong value shape");
  Eigen::JacobiSVD<Matrix> svd(ri);
  const auto sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-12 * sv(0))) throw SingularityError("CalculusHomomorphism: Op(omega_i) is singular");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(-2.0, 2.0), im(0.5, 2.0), sg(-1.0, 1.0);
  auto point = [&] { return cplx(re(rng), (sg(rng) < 0.0 ? -1.0 : 1.0) * im(rng)); };
  for (int trial = 0; trial < 5; ++trial) {
    const EFunction f1 = add_E(EFunction::omega(point()), scale_E(cplx(sg(rng), sg(rng)), EFunction::omega(point())));
    const EFunction f2 = add_E(EFunction::constant(sg(rng)), EFunction::omega(point()));
    const Matrix lhs = eval_(multiply_E(f1, f2));
    const Matrix rhs = eval_(f1) * eval_(f2);
    defect_ = std::max(defect_, norm2(lhs - rhs) / std::max(1.0, norm2(rhs)));
  }
  if (defect_ > mult_tol)
    throw DomainError("CalculusHomomorphism: multiplicativity defect " + std::to_string(defect_) +
                      " exceeds " + std::to_string(mult_tol));
}

CalculusHomomorphism CalculusHomomorphism::from_operator(const Operator& p, EPath path, const CalculusOptions& opt) {
  const Operator copy = p;
  return CalculusHomomorphism([copy, path, opt](const EFunction& f) { return apply_E(f, copy, path, opt).value; },
                              p.dim(), path == EPath::exact ? "operator:exact" : "operator:integral");
}

Recovery recover_generator(const CalculusHomomorphism& op, cplx z, cplx z_alt, double tol) {
  auto at = [&](cplx w, double* cond) {
    if (w.imag() == 0.0) throw DomainError("recover_generator: z must be off the real axis");
    const Matrix r = op(EFunction::omega(w));
    Eigen::JacobiSVD<Matrix> svd(r);
    const auto sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 1e-12 * sv(0))) throw SingularityError("recover_generator: Op(omega_z) is singular");
    if (cond) *cond = sv(0) / sv(sv.size() - 1);
    // x omega_z(x) = -1 + z omega_z(x)
    const Matrix x = op(EFunction(-1.0, {{w, w, 1}}));
    return Matrix(x * r.partialPivLu().inverse());
  };
  Recovery out;
  out.generator = at(z, &out.resolvent_condition);
  out.generator_alt = at(z_alt, nullptr);
  out.z_independence = norm2(out.generator - out.generator_alt) / std::max(1.0, norm2(out.generator));
  if (out.z_independence > tol)
    throw ConvergenceError("recover_generator: generator depends on z", out.z_independence);
  return out;
}

Composition compose_calculus(const SmoothFunction& g, const EFunction& f, const Operator& p,
                             const CalculusOptions& opt) {
  if (!f.is_real_on_line(1e-10)) throw DomainError("compose_calculus: f is not real on the line");
  Composition out;
  const Operator fp(apply_E(f, p, EPath::exact, opt).value);
  out.inner_spectrum = assert_real_spectrum(fp);
  out.lhs_result = apply_single(g, fp, opt);
  out.rhs_result = apply_single(compose_smooth(g, f), p, opt);
  out.lhs = out.lhs_result.value;
  out.rhs = out.rhs_result.value;
  return out;
}

nlohmann::json to_json(const CalculusResult& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : r.trace) trace.push_back({{"level", t.level}, {"nodes", t.nodes}, {"error_estimate", t.error_estimate}});
  return {{"value", io::matrix_to_json(r.value)},
          {"error_estimate", r.error_estimate},
          {"neglected", r.neglected},
          {"method", ahx::to_string(r.method)},
          {"spec", quad::to_json(r.spec)},
          {"node_count", r.node_count},
          {"trace", trace},
          {"diagnostics", r.diagnostics}};
}

}  // namespace fcalc::calculus
