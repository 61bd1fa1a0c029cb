// Compiled with -mavx2 -mfma; only reached through the runtime dispatcher.
#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "herdscan/kernels.hpp"

namespace herdscan::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double sum(std::span<const double> x) {
  const double* p = x.data();
  const std::size_t n = x.size();
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(p + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(p + i + 4));
  }
  if (i + 4 <= n) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(p + i));
    i += 4;
  }
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += p[i];
  return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
  const double* a = x.data();
  const double* b = y.data();
  const std::size_t n = x.size();
  __m256d d0 = _mm256_setzero_pd();
  __m256d d1 = _mm256_setzero_pd();
  __m256d d2 = _mm256_setzero_pd();
  __m256d d3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    d0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), d0);
    d1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), d1);
    d2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), d2);
    d3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), d3);
  }
  for (; i + 4 <= n; i += 4)
    d0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), d0);
  double s = hsum(_mm256_add_pd(_mm256_add_pd(d0, d1), _mm256_add_pd(d2, d3)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void accumulate_diff(std::span<double> acc, std::span<const double> x, std::span<const double> ref) {
  double* out = acc.data();
  const double* p = x.data();
  const double* r = ref.data();
  const std::size_t n = acc.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(p + i), _mm256_loadu_pd(r + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), d));
  }
  for (; i < n; ++i) out[i] += p[i] - r[i];
}

void accumulate_abs_diff(std::span<double> acc, std::span<const double> x,
                         std::span<const double> center) {
  // clearing the sign bit is exactly fabs
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  double* out = acc.data();
  const double* p = x.data();
  const double* c = center.data();
  const std::size_t n = acc.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_and_pd(_mm256_sub_pd(_mm256_loadu_pd(p + i), _mm256_loadu_pd(c + i)), mask);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), d));
  }
  for (; i < n; ++i) out[i] += std::fabs(p[i] - c[i]);
}

void subtract_scalar(std::span<double> x, double c) {
  const __m256d vc = _mm256_set1_pd(c);
  double* p = x.data();
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), vc));
  for (; i < n; ++i) p[i] -= c;
}

}  // namespace herdscan::kernels::avx2
