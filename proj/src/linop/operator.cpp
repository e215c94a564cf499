#include "fcalc/linop/operator.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>
#include <atomic>
#include <cmath>
#include <numeric>

namespace fcalc {

namespace {

std::atomic<std::uint64_t> next_id{1};
constexpr double kInfCond = std::numeric_limits<double>::infinity();

double condition(const Matrix& v) {
  if (v.size() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(v);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0)) return kInfCond;
  return s(0) / smin;
}

}  // namespace

Operator::Operator(Matrix p) : p_(std::move(p)), id_(next_id.fetch_add(1)) {
  if (p_.rows() < 1 || p_.rows() != p_.cols()) throw DomainError("operator must be square, n >= 1");
  if (!p_.allFinite()) throw DomainError("operator entries must be finite");
  norm_ = norm2(p_);

  Eigen::ComplexSchur<Matrix> schur(p_);
  if (schur.info() != Eigen::Success) throw Error("Schur factorization failed");
  q_ = schur.matrixU();
  t_ = schur.matrixT();
  const double res = norm2(q_ * t_ * q_.adjoint() - p_);
  if (res > 1e-12 * scale() * std::max<double>(1.0, std::sqrt(static_cast<double>(dim()))))
    throw Error("Schur residual too large");

  Eigen::ComplexEigenSolver<Matrix> es(p_);
  if (es.info() == Eigen::Success) {
    v_ = es.eigenvectors();
    eig_ = es.eigenvalues();
    cond_v_ = condition(v_);
  } else {
    cond_v_ = kInfCond;
  }
}

double Operator::distance_to_spectrum(cplx z) const {
  double d = kInfCond;
  for (Index i = 0; i < dim(); ++i) d = std::min(d, std::abs(z - t_(i, i)));
  return d;
}

Matrix Operator::resolvent(cplx z) const {
  if (distance_to_spectrum(z) <= 1e-12 * scale())
    throw SingularityError("resolvent requested at a point of the spectrum");
  const Index n = dim();
  Matrix a = z * Matrix::Identity(n, n) - p_;
  Eigen::PartialPivLU<Matrix> lu(a);
  Matrix x = lu.solve(Matrix::Identity(n, n));
  const double res = norm2(a * x - Matrix::Identity(n, n));
  const double cond = norm2(a) * norm2(x);
  if (!(res <= 1e-10 * std::max(1.0, cond))) throw SingularityError("resolvent solve is inaccurate");
  return x;
}

Matrix Operator::resolvent_schur(cplx z) const {
  if (distance_to_spectrum(z) <= 1e-12 * scale())
    throw SingularityError("resolvent requested at a point of the spectrum");
  const Index n = dim();
  Matrix a = z * Matrix::Identity(n, n) - t_;
  return a.triangularView<Eigen::Upper>().solve(Matrix::Identity(n, n));
}

SpectrumCertificate certify_real_spectrum(const Operator& p, double rel_tol) {
  SpectrumCertificate c;
  c.eigenvalues = p.eigenvalues();
  c.tolerance = rel_tol * p.scale();
  c.max_imag = 0.0;
  c.worst = c.eigenvalues.size() ? c.eigenvalues(0) : cplx(0.0);
  for (Index i = 0; i < c.eigenvalues.size(); ++i)
    if (std::abs(c.eigenvalues(i).imag()) > c.max_imag) {
      c.max_imag = std::abs(c.eigenvalues(i).imag());
      c.worst = c.eigenvalues(i);
    }
  c.real = c.max_imag <= c.tolerance;
  return c;
}

SpectrumCertificate assert_real_spectrum(const Operator& p, double rel_tol) {
  auto c = certify_real_spectrum(p, rel_tol);
  if (!c.real)
    throw SpectrumError("spectrum is not real (max |Im lambda| = " + std::to_string(c.max_imag) + ")",
                        c.worst);
  return c;
}

double GrowthProfile::bound(double y) const { return C * std::pow(std::abs(y), -N); }

GrowthBox default_growth_box(const Operator& p) {
  const auto ev = p.eigenvalues();
  double lo = ev(0).real(), hi = lo;
  for (Index i = 1; i < ev.size(); ++i) {
    lo = std::min(lo, ev(i).real());
    hi = std::max(hi, ev(i).real());
  }
  return {lo - 1.0, hi + 1.0};
}

GrowthProfile fit_growth(const Operator& p) { return fit_growth(p, default_growth_box(p)); }

GrowthProfile fit_growth(const Operator& p, const GrowthBox& box) {
  // x samples: a uniform grid plus the real parts of the eigenvalues, where
  // the sup over x is attained for normal matrices.
  std::vector<double> xs;
  const int nx = 41;
  for (int i = 0; i < nx; ++i) xs.push_back(box.x0 + (box.x1 - box.x0) * i / (nx - 1));
  const auto ev = p.eigenvalues();
  for (Index i = 0; i < ev.size(); ++i) xs.push_back(ev(i).real());

  std::vector<double> ly, lm;
  for (int k = box.k_min; k <= box.k_max; ++k) {
    const double y = std::ldexp(1.0, -k);
    double m = 0.0;
    for (double x : xs) m = std::max(m, norm2(p.resolvent_schur(cplx(x, y))));
    ly.push_back(std::log(y));
    lm.push_back(std::log(m));
  }
  // least squares  log m = log C - N log y
  const double n = static_cast<double>(ly.size());
  const double sx = std::accumulate(ly.begin(), ly.end(), 0.0);
  const double sy = std::accumulate(lm.begin(), lm.end(), 0.0);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ly.size(); ++i) {
    sxx += ly[i] * ly[i];
    sxy += ly[i] * lm[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;

  GrowthProfile g;
  g.box = box;
  g.N = std::max(0.0, -slope);
  double rss = 0.0, logc = icpt;
  for (std::size_t i = 0; i < ly.size(); ++i) {
    const double r = lm[i] - (icpt + slope * ly[i]);
    rss += r * r;
    // lift C until every sample satisfies the bound with the rounded N
    logc = std::max(logc, lm[i] + g.N * ly[i]);
  }
  g.residual = std::sqrt(rss / n);
  g.C = std::exp(logc) * 1.01;
  return g;
}

OperatorTuple::OperatorTuple(std::vector<Operator> ops, bool fit_profiles) : ops_(std::move(ops)) {
  if (ops_.empty()) throw DomainError("operator tuple needs m >= 1");
  for (const auto& p : ops_) {
    if (p.dim() != ops_.front().dim()) throw DomainError("tuple operators differ in dimension");
    certs_.push_back(assert_real_spectrum(p));
    if (fit_profiles) profiles_.push_back(fit_growth(p));
  }
}

double commutator_norm(const Matrix& a, const Matrix& b) { return norm2(a * b - b * a); }

bool is_commuting(const OperatorTuple& t, double tol) {
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      const double sc = std::max(1.0, t[i].norm() * t[j].norm());
      if (commutator_norm(t[i].matrix(), t[j].matrix()) > tol * sc) return false;
    }
  return true;
}

std::vector<std::vector<cplx>> joint_spectrum(const OperatorTuple& t, std::uint64_t seed,
                                              double collapse_tol) {
  if (!is_commuting(t, 1e-9)) throw DomainError("joint_spectrum needs a commuting tuple");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  const Index n = t.dim();
  for (int attempt = 0; attempt < 3; ++attempt) {
    Matrix comb = Matrix::Zero(n, n);
    for (const auto& p : t.operators()) comb += u(rng) * p.matrix();
    Eigen::ComplexSchur<Matrix> schur(comb);
    const Matrix& q = schur.matrixU();
    std::vector<Matrix> tri;
    bool ok = true;
    for (const auto& p : t.operators()) {
      Matrix m = q.adjoint() * p.matrix() * q;
      const Matrix lower = m.triangularView<Eigen::StrictlyLower>();
      if (norm2(lower) > 1e-8 * p.scale()) {
        ok = false;
        break;
      }
      tri.push_back(std::move(m));
    }
    if (!ok) continue;
    std::vector<std::vector<cplx>> pts;
    for (Index i = 0; i < n; ++i) {
      std::vector<cplx> pt;
      for (const auto& m : tri) pt.push_back(m(i, i));
      const bool dup = std::any_of(pts.begin(), pts.end(), [&](const std::vector<cplx>& q2) {
        for (std::size_t j = 0; j < pt.size(); ++j)
          if (std::abs(pt[j] - q2[j]) > collapse_tol) return false;
        return true;
      });
      if (!dup) pts.push_back(std::move(pt));
    }
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
      for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j].real() != b[j].real()) return a[j].real() < b[j].real();
        if (a[j].imag() != b[j].imag()) return a[j].imag() < b[j].imag();
      }
      return false;
    });
    return pts;
  }
  throw Error("joint_spectrum: simultaneous triangularization failed after 3 attempts");
}

Operator cayley(const Operator& p) {
  if (p.distance_to_spectrum(cplx(0, 1)) <= 1e-12 * p.scale())
    throw SpectrumError("cayley: i lies on the spectrum", cplx(0, 1));
  const Index n = p.dim();
  // (P - i)^{-1} = -(i - P)^{-1}
  return Operator(Matrix::Identity(n, n) - 2.0 * I * p.resolvent(I));
}

Operator inverse_cayley(const Operator& b) {
  if (b.distance_to_spectrum(1.0) <= 1e-12)
    throw SpectrumError("inverse_cayley: 1 lies on the spectrum", 1.0);
  const Index n = b.dim();
  const Matrix id = Matrix::Identity(n, n);
  Matrix inv = (b.matrix() - id).partialPivLu().solve(id);
  return Operator(I * (b.matrix() + id) * inv);
}

Matrix eigen_oracle(const ScalarFn& f, const Operator& p, double max_cond) {
  if (!(p.eigvec_condition() <= max_cond))
    throw OracleDeclined("eigenvector basis too ill-conditioned for the oracle");
  const Matrix& v = p.eigenvectors();
  Vector fl(p.dim());
  for (Index i = 0; i < p.dim(); ++i) fl(i) = f(p.eigenvector_values()(i));
  return v * fl.asDiagonal() * v.partialPivLu().inverse();
}

Matrix eigen_oracle(const ScalarFnM& f, const OperatorTuple& t, double max_cond) {
  if (!is_commuting(t, 1e-9)) throw OracleDeclined("tuple does not commute");
  const Index n = t.dim();
  // eigenvectors of a generic combination diagonalize every member
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  Matrix comb = Matrix::Zero(n, n);
  for (const auto& p : t.operators()) comb += u(rng) * p.matrix();
  Eigen::ComplexEigenSolver<Matrix> es(comb);
  const Matrix v = es.eigenvectors();
  if (!(condition(v) <= max_cond)) throw OracleDeclined("tuple eigenbasis too ill-conditioned");
  const Matrix vinv = v.partialPivLu().inverse();
  std::vector<Vector> diags;
  for (const auto& p : t.operators()) {
    Matrix d = vinv * p.matrix() * v;
    Matrix off = d;
    off.diagonal().setZero();
    if (norm2(off) > 1e-8 * p.scale() * condition(v))
      throw OracleDeclined("tuple is not simultaneously diagonalizable");
    diags.push_back(d.diagonal());
  }
  Vector fl(n);
  for (Index i = 0; i < n; ++i) {
    std::vector<cplx> pt;
    for (const auto& d : diags) pt.push_back(d(i));
    fl(i) = f(pt);
  }
  return v * fl.asDiagonal() * vinv;
}

Matrix random_symmetric(Index n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = g(rng);
  Eigen::MatrixXd s = 0.5 * (a + a.transpose()) * scale;
  return s.cast<cplx>();
}

Matrix random_gaussian(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = g(rng);
  return a;
}

Matrix symmetric_with_spectrum(const std::vector<double>& eig, std::mt19937_64& rng) {
  const Index n = static_cast<Index>(eig.size());
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd d(n);
  for (Index i = 0; i < n; ++i) d(i) = eig[static_cast<std::size_t>(i)];
  Eigen::MatrixXd s = q * d.asDiagonal() * q.transpose();
  s = 0.5 * (s + s.transpose());
  return s.cast<cplx>();
}

Matrix rotation(double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

}  // namespace fcalc
