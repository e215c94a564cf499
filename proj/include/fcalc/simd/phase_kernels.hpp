#pragma once

// Trigonometric-sum kernels on uniform frequency grids.
//
// Two shapes cover every hot loop of the Fourier-based extension:
//
//   phase_sum:        out[j] (+)= sum_k coef[k] * exp(i * x[j] * (xi0 + k*dxi))
//                     (many evaluation points, one uniform frequency grid)
//   phase_sum_sym:    out[j] (+)= sum_k pos[k] * exp(i x[j] xi_k) + neg[k] * exp(-i x[j] xi_k)
//                     (a band and its mirror image sharing one phase chain)
//   phase_accumulate: out[k] += sum_j coef[j] * exp(i * sign * x[j] * (xi0 + k*dxi))
//                     (transform of nonuniform samples onto a uniform grid)
//
// Each kernel exists as a scalar reference and as an AVX2+FMA variant; the
// variant is picked once at runtime from CPUID and can be forced through
// FCALC_ISA=scalar|avx2 or set_isa(). Phases are advanced by complex rotation
// and re-seeded from exact sin/cos every kReseed steps so the drift stays at a
// few ulps per block.

#include <complex>
#include <span>
#include <string_view>

namespace fcalc::simd {

using cplx = std::complex<double>;

inline constexpr int kReseed = 64;

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;
  void (*phase_sum)(std::span<const double> xs, double xi0, double dxi,
                    std::span<const cplx> coef, std::span<cplx> out,
                    bool accumulate);
  void (*phase_sum_sym)(std::span<const double> xs, double xi0, double dxi,
                        std::span<const cplx> pos, std::span<const cplx> neg,
                        std::span<cplx> out, bool accumulate);
  void (*phase_accumulate)(std::span<const double> xs, std::span<const cplx> coef,
                           double sign, double xi0, double dxi,
                           std::span<cplx> out);
};

/// Active kernel table (resolved on first use).
const KernelTable& kernels();

/// Table for a specific ISA; throws if the CPU cannot run it.
const KernelTable& kernels_for(Isa isa);

/// Override the active table. Returns the previous ISA.
Isa set_isa(Isa isa);

bool cpu_has_avx2();

namespace scalar {
void phase_sum(std::span<const double> xs, double xi0, double dxi,
               std::span<const cplx> coef, std::span<cplx> out, bool accumulate);
void phase_sum_sym(std::span<const double> xs, double xi0, double dxi,
                   std::span<const cplx> pos, std::span<const cplx> neg,
                   std::span<cplx> out, bool accumulate);
void phase_accumulate(std::span<const double> xs, std::span<const cplx> coef,
                      double sign, double xi0, double dxi, std::span<cplx> out);
}  // namespace scalar

namespace avx2 {
bool compiled();
void phase_sum(std::span<const double> xs, double xi0, double dxi,
               std::span<const cplx> coef, std::span<cplx> out, bool accumulate);
void phase_sum_sym(std::span<const double> xs, double xi0, double dxi,
                   std::span<const cplx> pos, std::span<const cplx> neg,
                   std::span<cplx> out, bool accumulate);
void phase_accumulate(std::span<const double> xs, std::span<const cplx> coef,
                      double sign, double xi0, double dxi, std::span<cplx> out);
}  // namespace avx2

}  // namespace fcalc::simd
