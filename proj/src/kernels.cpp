#include "nnequiv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <string>

#if defined(__x86_64__) || defined(_M_X64)
#define NNEQUIV_X86 1
#include <immintrin.h>
#else
#define NNEQUIV_X86 0
#endif

namespace nnequiv::kern {

namespace scalar {

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double abs_sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(x[i]);
  return acc;
}

void relu(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void scale(double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void matvec(const double* w, const double* x, const double* bias, double* out,
            std::size_t m, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    out[i] = (bias ? bias[i] : 0.0) + dot(w + i * n, x, n);
}

}  // namespace scalar

#if NNEQUIV_X86

#define NNEQUIV_AVX2 __attribute__((target("avx2,fma")))

namespace avx2 {

NNEQUIV_AVX2 static inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

NNEQUIV_AVX2 double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

NNEQUIV_AVX2 void axpy(double* y, double a, const double* x, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

NNEQUIV_AVX2 double abs_sum(const double* x, std::size_t n) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_and_pd(_mm256_loadu_pd(x + i), mask));
  double r = hsum(acc);
  for (; i < n; ++i) r += std::fabs(x[i]);
  return r;
}

NNEQUIV_AVX2 void relu(double* x, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  for (; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

NNEQUIV_AVX2 void scale(double* x, double a, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
  for (; i < n; ++i) x[i] *= a;
}

NNEQUIV_AVX2 void matvec(const double* w, const double* x, const double* bias,
                         double* out, std::size_t m, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    out[i] = (bias ? bias[i] : 0.0) + dot(w + i * n, x, n);
}

}  // namespace avx2

#endif  // NNEQUIV_X86

namespace {

struct Dispatch {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double*, double, const double*, std::size_t);
  double (*abs_sum)(const double*, std::size_t);
  void (*relu)(double*, std::size_t);
  void (*scale)(double*, double, std::size_t);
  void (*matvec)(const double*, const double*, const double*, double*,
                 std::size_t, std::size_t);
};

constexpr Dispatch kScalar = {scalar::dot,  scalar::axpy,  scalar::abs_sum,
                              scalar::relu, scalar::scale, scalar::matvec};

#if NNEQUIV_X86
constexpr Dispatch kAvx2 = {avx2::dot,  avx2::axpy,  avx2::abs_sum,
                            avx2::relu, avx2::scale, avx2::matvec};
#endif

bool avx2_supported() {
#if NNEQUIV_X86
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Dispatch g_dispatch = kScalar;
Backend g_backend = Backend::Scalar;
std::once_flag g_init;

void apply(Backend b) {
  if (b == Backend::Avx2) {
    if (!avx2_supported()) throw std::runtime_error("avx2 backend unsupported on this cpu");
#if NNEQUIV_X86
    g_dispatch = kAvx2;
#endif
  } else {
    g_dispatch = kScalar;
  }
  g_backend = b;
}

void init_once() {
  std::call_once(g_init, [] {
    Backend want = avx2_supported() ? Backend::Avx2 : Backend::Scalar;
    if (const char* env = std::getenv("NNEQUIV_SIMD")) {
      std::string s(env);
      if (s == "scalar") want = Backend::Scalar;
      else if (s == "avx2") want = Backend::Avx2;
    }
    apply(want);
  });
}

}  // namespace

Backend active_backend() {
  init_once();
  return g_backend;
}

void set_backend(Backend b) {
  init_once();
  apply(b);
}

double dot(const double* x, const double* y, std::size_t n) {
  init_once();
  return g_dispatch.dot(x, y, n);
}

void axpy(double* y, double a, const double* x, std::size_t n) {
  init_once();
  g_dispatch.axpy(y, a, x, n);
}

double abs_sum(const double* x, std::size_t n) {
  init_once();
  return g_dispatch.abs_sum(x, n);
}

void relu(double* x, std::size_t n) {
  init_once();
  g_dispatch.relu(x, n);
}

void scale(double* x, double a, std::size_t n) {
  init_once();
  g_dispatch.scale(x, a, n);
}

void matvec(const double* w, const double* x, const double* bias, double* out,
            std::size_t m, std::size_t n) {
  init_once();
  g_dispatch.matvec(w, x, bias, out, m, n);
}

}  // namespace nnequiv::kern
