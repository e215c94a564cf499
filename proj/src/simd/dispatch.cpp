#include "fcalc/simd/phase_kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace fcalc::simd {

namespace {

const KernelTable kScalar{Isa::scalar, "scalar", &scalar::phase_sum, &scalar::phase_sum_sym,
                          &scalar::phase_accumulate};
const KernelTable kAvx2{Isa::avx2, "avx2", &avx2::phase_sum, &avx2::phase_sum_sym,
                        &avx2::phase_accumulate};

const KernelTable* resolve_default() {
  if (const char* env = std::getenv("FCALC_ISA")) {
    const std::string want(env);
    if (want == "scalar") return &kScalar;
    if (want == "avx2" && cpu_has_avx2()) return &kAvx2;
  }
  return cpu_has_avx2() ? &kAvx2 : &kScalar;
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{resolve_default()};
  return table;
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = avx2::compiled() && __builtin_cpu_supports("avx2") &&
                         __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

const KernelTable& kernels_for(Isa isa) {
  if (isa == Isa::scalar) return kScalar;
  if (!cpu_has_avx2()) throw std::runtime_error("avx2 kernels unavailable on this CPU");
  return kAvx2;
}

Isa set_isa(Isa isa) {
  const KernelTable* next = &kernels_for(isa);
  return active().exchange(next, std::memory_order_acq_rel)->isa;
}

}  // namespace fcalc::simd
