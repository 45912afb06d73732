#include "chanlab/simd/kernels.hpp"

#include <cmath>

namespace chanlab::simd {
namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double wdot_scalar(const double* w, const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * x[i] * y[i];
  return s;
}

void stencil_scalar(const double* c, std::size_t width, const double* in, double* out,
                    std::size_t n_out) {
  for (std::size_t j = 0; j < n_out; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < width; ++k) s += c[k] * in[j + k];
    out[j] = s;
  }
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_add_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += a[i] * b[i];
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
  return m;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar,    axpy_scalar, dot_scalar,
                                 wdot_scalar,    stencil_scalar, mul_scalar,
                                 mul_add_scalar, max_abs_scalar};
  return table;
}

}  // namespace chanlab::simd
