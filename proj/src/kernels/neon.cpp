#include "kernel_fns.hpp"

#if defined(__aarch64__) || defined(_M_ARM64)

#include <arm_neon.h>

// NEON variants, 2 doubles per lane. NEON is baseline on aarch64 so no runtime
// feature check is needed. Keep this TU free of hosted stdlib includes.
namespace horosvm::kernels::neon {

void sq_dist_cols(const double* x_cm, size_t count, size_t dim, const double* w,
                  double* out) {
  size_t i = 0;
  for (; i + 2 <= count; i += 2) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (size_t d = 0; d < dim; ++d) {
      const float64x2_t wd = vdupq_n_f64(w[d]);
      const float64x2_t xv = vld1q_f64(x_cm + d * count + i);
      const float64x2_t diff = vsubq_f64(wd, xv);
      acc = vfmaq_f64(acc, diff, diff);
    }
    vst1q_f64(out + i, acc);
  }
  for (; i < count; ++i) {
    double s = 0.0;
    for (size_t d = 0; d < dim; ++d) {
      const double diff = w[d] - x_cm[d * count + i];
      s += diff * diff;
    }
    out[i] = s;
  }
}

void weighted_colsum(const double* x_cm, size_t count, size_t dim, const double* coef,
                     double* out) {
  for (size_t d = 0; d < dim; ++d) {
    const double* col = x_cm + d * count;
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    size_t i = 0;
    for (; i + 4 <= count; i += 4) {
      acc0 = vfmaq_f64(acc0, vld1q_f64(coef + i), vld1q_f64(col + i));
      acc1 = vfmaq_f64(acc1, vld1q_f64(coef + i + 2), vld1q_f64(col + i + 2));
    }
    for (; i + 2 <= count; i += 2) {
      acc0 = vfmaq_f64(acc0, vld1q_f64(coef + i), vld1q_f64(col + i));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < count; ++i) s += coef[i] * col[i];
    out[d] = s;
  }
}

}  // namespace horosvm::kernels::neon

#endif  // aarch64
