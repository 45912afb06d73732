#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "chanlab/simd/kernels.hpp"

namespace chanlab::simd {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* select_default() {
  const char* env = std::getenv("CHANNEL_LAB_SIMD");
  const std::string want = env ? env : "auto";
  if (want == "scalar") return &scalar_kernels();
  if (want == "avx2") {
    if (!cpu_has_avx2()) throw std::runtime_error("CHANNEL_LAB_SIMD=avx2 but CPU lacks AVX2/FMA");
    return &avx2_kernels();
  }
  return cpu_has_avx2() ? &avx2_kernels() : &scalar_kernels();
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{select_default()};
  return table;
}

}  // namespace

bool isa_supported(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) throw std::runtime_error("requested ISA not supported on this CPU");
  active().store(isa == Isa::avx2 ? &avx2_kernels() : &scalar_kernels(),
                 std::memory_order_release);
}

}  // namespace chanlab::simd
