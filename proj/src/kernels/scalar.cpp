#include "kernel_fns.hpp"

// Reference kernels. These define the semantics the SIMD backends are tested
// against; keep them straightforward loops.
namespace horosvm::kernels::scalar {

void sq_dist_cols(const double* x_cm, size_t count, size_t dim, const double* w,
                  double* out) {
  for (size_t i = 0; i < count; ++i) out[i] = 0.0;
  for (size_t d = 0; d < dim; ++d) {
    const double wd = w[d];
    const double* col = x_cm + d * count;
    for (size_t i = 0; i < count; ++i) {
      const double diff = wd - col[i];
      out[i] += diff * diff;
    }
  }
}

void weighted_colsum(const double* x_cm, size_t count, size_t dim, const double* coef,
                     double* out) {
  for (size_t d = 0; d < dim; ++d) {
    const double* col = x_cm + d * count;
    double s = 0.0;
    for (size_t i = 0; i < count; ++i) s += coef[i] * col[i];
    out[d] = s;
  }
}

}  // namespace horosvm::kernels::scalar
