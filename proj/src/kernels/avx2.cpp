#include "kernel_fns.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

// AVX2+FMA variants, 4 doubles per lane. This translation unit is compiled
// with -mavx2 -mfma; the dispatcher only selects it after a cpuid check.
namespace horosvm::kernels::avx2 {

void sq_dist_cols(const double* x_cm, size_t count, size_t dim, const double* w,
                  double* out) {
  size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (size_t d = 0; d < dim; ++d) {
      const __m256d wd = _mm256_set1_pd(w[d]);
      const __m256d xv = _mm256_loadu_pd(x_cm + d * count + i);
      const __m256d diff = _mm256_sub_pd(wd, xv);
      acc = _mm256_fmadd_pd(diff, diff, acc);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  // Scalar tail.
  for (; i < count; ++i) {
    double s = 0.0;
    for (size_t d = 0; d < dim; ++d) {
      const double diff = w[d] - x_cm[d * count + i];
      s += diff * diff;
    }
    out[i] = s;
  }
}

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d sum2 = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(sum2, _mm_unpackhi_pd(sum2, sum2)));
}

}  // namespace

void weighted_colsum(const double* x_cm, size_t count, size_t dim, const double* coef,
                     double* out) {
  for (size_t d = 0; d < dim; ++d) {
    const double* col = x_cm + d * count;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 8 <= count; i += 8) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(coef + i), _mm256_loadu_pd(col + i), acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(coef + i + 4), _mm256_loadu_pd(col + i + 4), acc1);
    }
    for (; i + 4 <= count; i += 4) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(coef + i), _mm256_loadu_pd(col + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < count; ++i) s += coef[i] * col[i];
    out[d] = s;
  }
}

}  // namespace horosvm::kernels::avx2

#endif  // x86-64
