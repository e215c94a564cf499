#pragma once

// Shared scalar/matrix aliases and the library's exception types.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace fcalc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

/// Base class of everything the library throws on a violated precondition
/// or a failed numerical postcondition.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside an operation's domain (bad parameters, wrong shapes,
/// derivative order beyond what a node can provide, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A matrix that had to be inverted is singular to working precision.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// A spectrum certificate failed. Carries the offending eigenvalue.
class SpectrumError : public Error {
 public:
  SpectrumError(const std::string& what, cplx eigenvalue)
      : Error(what), eigenvalue_(eigenvalue) {}
  cplx eigenvalue() const { return eigenvalue_; }

 private:
  cplx eigenvalue_;
};

/// An independent oracle could not be applied (e.g. ill-conditioned
/// eigenvectors); callers fall back to consistency checks.
class OracleDeclined : public Error {
 public:
  using Error::Error;
};

/// Quadrature or series did not reach the requested tolerance within budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// Operator 2-norm (largest singular value).
inline double norm2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace fcalc
