// AVX2/FMA variants. Compiled with per-function target attributes so the
// library itself does not require AVX2; dispatch.cpp only hands these out
// when the CPU reports both features.

#include "chanlab/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define CHANLAB_HAVE_X86 1
#include <immintrin.h>
#else
#define CHANLAB_HAVE_X86 0
#endif

namespace chanlab::simd {

#if CHANLAB_HAVE_X86
namespace {

#define CHANLAB_AVX2 __attribute__((target("avx2,fma")))

CHANLAB_AVX2 double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

CHANLAB_AVX2 void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d y0 = _mm256_loadu_pd(y + i);
    __m256d y1 = _mm256_loadu_pd(y + i + 4);
    y0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), y0);
    y1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), y1);
    _mm256_storeu_pd(y + i, y0);
    _mm256_storeu_pd(y + i + 4, y1);
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

CHANLAB_AVX2 double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

CHANLAB_AVX2 double wdot_avx2(const double* w, const double* x, const double* y, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xy = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), xy, s0);
  }
  double s = hsum(s0);
  for (; i < n; ++i) s += w[i] * x[i] * y[i];
  return s;
}

CHANLAB_AVX2 void stencil_avx2(const double* c, std::size_t width, const double* in,
                                double* out, std::size_t n_out) {
  std::size_t j = 0;
  for (; j + 4 <= n_out; j += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < width; ++k) {
      acc = _mm256_fmadd_pd(_mm256_set1_pd(c[k]), _mm256_loadu_pd(in + j + k), acc);
    }
    _mm256_storeu_pd(out + j, acc);
  }
  for (; j < n_out; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < width; ++k) s += c[k] * in[j + k];
    out[j] = s;
  }
}

CHANLAB_AVX2 void mul_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

CHANLAB_AVX2 void mul_add_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                                              _mm256_loadu_pd(out + i)));
  }
  for (; i < n; ++i) out[i] += a[i] * b[i];
}

CHANLAB_AVX2 double max_abs_avx2(const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = lanes[0];
  for (int k = 1; k < 4; ++k) r = lanes[k] > r ? lanes[k] : r;
  for (; i < n; ++i) {
    const double a = x[i] < 0 ? -x[i] : x[i];
    r = a > r ? a : r;
  }
  return r;
}

#undef CHANLAB_AVX2

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{Isa::avx2,   axpy_avx2, dot_avx2,     wdot_avx2,
                                 stencil_avx2, mul_avx2, mul_add_avx2, max_abs_avx2};
  return table;
}

#else

const KernelTable& avx2_kernels() { return scalar_kernels(); }

#endif

}  // namespace chanlab::simd
