#include "kgstress/kernels.hpp"

#if KGSTRESS_HAVE_AVX2

#include <immintrin.h>

#include <cmath>

namespace kgstress::kernels {
namespace {

inline double hsum256(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    __m256d va = _mm256_loadu_pd(a.data() + i);
    __m256d vb = _mm256_loadu_pd(b.data() + i);
    acc = _mm256_fmadd_pd(va, vb, acc);
  }
  double s = hsum256(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double l1_diff_avx2(std::span<const double> a, std::span<const double> b) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const std::size_t n = a.size();
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i),
                              _mm256_loadu_pd(b.data() + i));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign_mask, d));
  }
  double s = hsum256(acc);
  for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

double l2_norm_avx2(std::span<const double> a) {
  const std::size_t n = a.size();
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(a.data() + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum256(acc);
  for (; i < n; ++i) s += a[i] * a[i];
  return std::sqrt(s);
}

double sum_avx2(std::span<const double> a) {
  const std::size_t n = a.size();
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a.data() + i));
  double s = hsum256(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

void axpy_avx2(double alpha, std::span<const double> x, std::span<double> y) {
  const __m256d va = _mm256_set1_pd(alpha);
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y.data() + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), vy);
    _mm256_storeu_pd(y.data() + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, std::span<double> x) {
  const __m256d va = _mm256_set1_pd(alpha);
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x.data() + i, _mm256_mul_pd(va, _mm256_loadu_pd(x.data() + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

}  // namespace

const Backend& avx2_backend() {
  static const Backend b{dot_avx2, l1_diff_avx2, l2_norm_avx2,
                         sum_avx2, axpy_avx2,    scale_avx2,
                         "avx2"};
  return b;
}

}  // namespace kgstress::kernels

#endif  // KGSTRESS_HAVE_AVX2
