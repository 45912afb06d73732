#pragma once
// Data-parallel inner loops used by the field operators.
//
// Every kernel has a scalar reference version and an AVX2/FMA version; the
// active table is chosen once at startup from the CPU features (and the
// CHANNEL_LAB_SIMD environment variable: "scalar", "avx2" or "auto").

#include <cstddef>
#include <string_view>

namespace chanlab::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // sum x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum w[i] * x[i] * y[i]
  double (*wdot)(const double* w, const double* x, const double* y, std::size_t n);
  // out[j] = sum_s c[s] * in[j + s], j in [0, n_out)
  void (*stencil)(const double* c, std::size_t width, const double* in, double* out,
                  std::size_t n_out);
  // out[i] = a[i] * b[i]
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // out[i] += a[i] * b[i]
  void (*mul_add)(const double* a, const double* b, double* out, std::size_t n);
  // max |x[i]|
  double (*max_abs)(const double* x, std::size_t n);
};

const KernelTable& scalar_kernels();
const KernelTable& avx2_kernels();

bool isa_supported(Isa isa);
std::string_view isa_name(Isa isa);

// Active table. Thread-safe after first call.
const KernelTable& kernels();
// Override the active table (tests and benchmarks). Throws if unsupported.
void set_active_isa(Isa isa);

}  // namespace chanlab::simd
