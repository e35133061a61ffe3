#pragma once

// Declarations of the per-backend kernel entry points. This header must stay
// freestanding-safe (no hosted stdlib includes): the NEON translation unit is
// built with only the compiler's builtin headers available.
#include <stddef.h>

namespace horosvm::kernels {

namespace scalar {
void sq_dist_cols(const double* x_cm, size_t count, size_t dim, const double* w, double* out);
void weighted_colsum(const double* x_cm, size_t count, size_t dim, const double* coef, double* out);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void sq_dist_cols(const double* x_cm, size_t count, size_t dim, const double* w, double* out);
void weighted_colsum(const double* x_cm, size_t count, size_t dim, const double* coef, double* out);
}  // namespace avx2
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
namespace neon {
void sq_dist_cols(const double* x_cm, size_t count, size_t dim, const double* w, double* out);
void weighted_colsum(const double* x_cm, size_t count, size_t dim, const double* coef, double* out);
}  // namespace neon
#endif

}  // namespace horosvm::kernels
