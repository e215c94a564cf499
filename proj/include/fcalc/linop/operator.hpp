#pragma once

#include "fcalc/core.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace fcalc {

// Dense square matrix with its Schur form and (when it exists) an
// eigendecomposition, all computed once at construction.
class Operator {
 public:
  explicit Operator(Matrix p);

  const Matrix& matrix() const { return p_; }
  Index dim() const { return p_.rows(); }
  double norm() const { return norm_; }
  double scale() const { return std::max(1.0, norm_); }
  std::uint64_t id() const { return id_; }

  const Matrix& schur_q() const { return q_; }
  const Matrix& schur_t() const { return t_; }
  Vector eigenvalues() const { return t_.diagonal(); }

  /// Right eigenvectors (columns) and their 2-norm condition number; the
  /// number is +inf when the solver returns a singular basis.
  const Matrix& eigenvectors() const { return v_; }
  double eigvec_condition() const { return cond_v_; }
  /// Eigenvalues in the column order of eigenvectors().
  const Vector& eigenvector_values() const { return eig_; }

  double distance_to_spectrum(cplx z) const;

  /// (zI - P)^{-1} via partial-pivot LU.
  Matrix resolvent(cplx z) const;
  /// (zI - T)^{-1} in the Schur basis (upper triangular).
  Matrix resolvent_schur(cplx z) const;
  /// Schur-basis matrix -> original basis.
  Matrix from_schur(const Matrix& m) const { return q_ * m * q_.adjoint(); }

 private:
  Matrix p_, q_, t_, v_;
  Vector eig_;
  double norm_ = 0.0, cond_v_ = 0.0;
  std::uint64_t id_;
};

struct SpectrumCertificate {
  bool real = false;
  double max_imag = 0.0;
  double tolerance = 0.0;
  Vector eigenvalues;
  cplx worst;  // eigenvalue with the largest |Im|
};

SpectrumCertificate certify_real_spectrum(const Operator& p, double rel_tol = 1e-9);
/// Throws SpectrumError carrying the offending eigenvalue on failure.
SpectrumCertificate assert_real_spectrum(const Operator& p, double rel_tol = 1e-9);

struct GrowthBox {
  double x0, x1;
  int k_min = 1, k_max = 12;  // y in {2^-k}
};

// ||(z-P)^{-1}|| <= C |Im z|^{-N} on the probe box.
struct GrowthProfile {
  double C = 1.0;
  double N = 1.0;
  double residual = 0.0;  // rms of the log-log fit
  GrowthBox box{0.0, 0.0};
  double bound(double y) const;
};

GrowthBox default_growth_box(const Operator& p);
GrowthProfile fit_growth(const Operator& p, const GrowthBox& box);
GrowthProfile fit_growth(const Operator& p);

class OperatorTuple {
 public:
  OperatorTuple() = default;
  explicit OperatorTuple(std::vector<Operator> ops, bool fit_profiles = true);

  std::size_t size() const { return ops_.size(); }
  Index dim() const { return ops_.empty() ? 0 : ops_.front().dim(); }
  const Operator& operator[](std::size_t j) const { return ops_[j]; }
  const std::vector<Operator>& operators() const { return ops_; }
  const std::vector<SpectrumCertificate>& certificates() const { return certs_; }
  const std::vector<GrowthProfile>& profiles() const { return profiles_; }

 private:
  std::vector<Operator> ops_;
  std::vector<SpectrumCertificate> certs_;
  std::vector<GrowthProfile> profiles_;
};

double commutator_norm(const Matrix& a, const Matrix& b);
bool is_commuting(const OperatorTuple& t, double tol = 1e-10);

/// Joint eigenvalue tuples of a commuting tuple via a shared Schur basis.
std::vector<std::vector<cplx>> joint_spectrum(const OperatorTuple& t, std::uint64_t seed = 7,
                                              double collapse_tol = 1e-8);

/// B = I + 2i (P - iI)^{-1}
Operator cayley(const Operator& p);
/// P = i (B + I)(B - I)^{-1}
Operator inverse_cayley(const Operator& b);

using ScalarFn = std::function<cplx(cplx)>;
using ScalarFnM = std::function<cplx(const std::vector<cplx>&)>;

/// V diag(f(lambda)) V^{-1}; throws OracleDeclined when cond(V) > max_cond.
Matrix eigen_oracle(const ScalarFn& f, const Operator& p, double max_cond = 1e6);
/// Simultaneous diagonalization of a commuting diagonalizable tuple.
Matrix eigen_oracle(const ScalarFnM& f, const OperatorTuple& t, double max_cond = 1e6);

// Test-matrix generators (deterministic given the engine state).
Matrix random_symmetric(Index n, std::mt19937_64& rng, double scale = 1.0);
Matrix random_gaussian(Index n, std::mt19937_64& rng);
/// Real symmetric matrix with prescribed eigenvalues and a random orthogonal basis.
Matrix symmetric_with_spectrum(const std::vector<double>& eig, std::mt19937_64& rng);
Matrix rotation(double angle);

}  // namespace fcalc
