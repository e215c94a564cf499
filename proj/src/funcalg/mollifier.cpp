#include "fcalc/funcalg/mollifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace fcalc::mollifier {

namespace {

// Below this exponent exp() is zero in double; all derivatives vanish too
// because every term carries the factor exp(phi).
constexpr double kUnderflow = -745.0;

// Zeroed scratch of n doubles; on the stack for the orders used in practice.
class Scratch {
 public:
  explicit Scratch(std::size_t n) : n_(n) {
    if (n > fixed_.size()) heap_.resize(n);
    std::fill(data(), data() + n, 0.0);
  }
  double* data() { return heap_.empty() ? fixed_.data() : heap_.data(); }
  double& operator[](std::size_t i) { return data()[i]; }
  operator std::span<double>() { return {data(), n_}; }

 private:
  std::size_t n_;
  std::array<double, 24> fixed_;
  std::vector<double> heap_;
};

// Faa di Bruno for exp(phi): E_n = sum_j C(n-1,j) phi^(j+1) E_{n-1-j}.
// dphi[j] holds phi^(j+1).
void exp_jet(double phi0, std::span<const double> dphi, std::span<double> out) {
  const std::size_t K = out.size();
  if (K == 0) return;
  if (phi0 < kUnderflow) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  out[0] = std::exp(phi0);
  Scratch binom(K);
  binom[0] = 1.0;
  for (std::size_t n = 1; n < K; ++n) {
    // binom holds row n-1 of Pascal's triangle
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += binom[j] * dphi[j] * out[n - 1 - j];
    out[n] = s;
    for (std::size_t j = n; j > 0; --j) binom[j] += binom[j - 1];
  }
}

// h(u) = exp(-1/u), u > 0.
void h_jet(double u, std::span<double> out) {
  if (u <= 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const std::size_t K = out.size();
  Scratch dphi(K);
  double fact = 1.0;      // j!
  double upow = 1.0 / u;  // u^{-j-1}
  for (std::size_t j = 0; j < K; ++j) {
    // phi^(j+1) = -(-1)^(j+1) (j+1)! u^{-j-2}
    fact *= static_cast<double>(j + 1);
    upow /= u;
    dphi[j] = ((j + 1) % 2 == 0 ? -1.0 : 1.0) * fact * upow;
  }
  exp_jet(-1.0 / u, std::span<double>(dphi), out);
}

}  // namespace

void bump_jet(double t, std::span<double> out) {
  if (!(std::abs(t) < 1.0)) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const std::size_t K = out.size();
  const double a = 1.0 / (1.0 - t), b = 1.0 / (1.0 + t);
  Scratch dphi(K);
  double fact = 1.0, ap = a, bp = b;
  for (std::size_t j = 0; j < K; ++j) {
    // phi^(j+1) = -1/2 (j+1)! [(1-t)^{-j-2} + (-1)^{j+1} (1+t)^{-j-2}]
    fact *= static_cast<double>(j + 1);
    ap *= a;
    bp *= b;
    const double sgn = (j + 1) % 2 == 0 ? 1.0 : -1.0;
    dphi[j] = -0.5 * fact * (ap + sgn * bp);
  }
  exp_jet(-1.0 / (1.0 - t * t), std::span<double>(dphi), out);
}

void step_jet(double s, std::span<double> out) {
  const std::size_t K = out.size();
  if (K == 0) return;
  std::fill(out.begin(), out.end(), 0.0);
  if (s <= 0.0) {
    out[0] = 1.0;
    return;
  }
  if (s >= 1.0) return;

  Scratch A(K), B(K), D(K);
  h_jet(1.0 - s, A);
  h_jet(s, B);
  for (std::size_t n = 0; n < K; ++n) {
    if (n % 2 == 1) A[n] = -A[n];
    D[n] = A[n] + B[n];
  }
  // quotient jet: q D = A
  Scratch binom(K);
  binom[0] = 1.0;
  for (std::size_t n = 0; n < K; ++n) {
    double acc = A[n];
    for (std::size_t j = 1; j <= n; ++j) acc -= binom[j] * D[j] * out[n - j];
    out[n] = acc / D[0];
    for (std::size_t j = n + 1; j > 0; --j)
      if (j < K) binom[j] += binom[j - 1];
  }
}

double bump(double t) {
  if (!(std::abs(t) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

double step(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - s));
  const double b = std::exp(-1.0 / s);
  return a / (a + b);
}

double chi(double t) { return step(2.0 * std::abs(t) - 1.0); }

double chi_prime(double t) {
  const double at = std::abs(t);
  if (at <= 0.5 || at >= 1.0) return 0.0;
  double j[2];
  step_jet(2.0 * at - 1.0, j);
  return (t > 0 ? 2.0 : -2.0) * j[1];
}

void chi_jet(double t, std::span<double> out) {
  const double at = std::abs(t);
  step_jet(2.0 * at - 1.0, out);
  const double sc = t >= 0 ? 2.0 : -2.0;
  double f = 1.0;
  for (std::size_t n = 1; n < out.size(); ++n) {
    f *= sc;
    out[n] *= f;
  }
}

double chi_prime_sup() {
  static const double sup = [] {
    double m = 0.0;
    for (int i = 1; i < 4000; ++i) m = std::max(m, std::abs(chi_prime(0.5 + 0.5 * i / 4000.0)));
    return m * 1.001;
  }();
  return sup;
}

}  // namespace fcalc::mollifier
