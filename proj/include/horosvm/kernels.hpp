#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

// Batched inner loops of training and prediction. Datasets are laid out
// coordinate-major so that per-sample reductions vectorize; the backends are
// scalar reference kernels plus SIMD variants selected once at runtime
// (AVX2+FMA on x86-64, NEON on aarch64) and equivalence-tested against the
// scalar path.
namespace horosvm::kernels {

// out[i] = sum_d (w[d] - x[d*count + i])^2 for i in [0, count)
using SqDistColsFn = void (*)(const double* x_cm, std::size_t count, std::size_t dim,
                              const double* w, double* out);

// out[d] = sum_i coef[i] * x[d*count + i] for d in [0, dim)
using WeightedColsumFn = void (*)(const double* x_cm, std::size_t count, std::size_t dim,
                                  const double* coef, double* out);

struct Backend {
  const char* name;
  SqDistColsFn sq_dist_cols;
  WeightedColsumFn weighted_colsum;
};

// The scalar reference backend (always available).
const Backend& scalar_backend();

// All backends usable on this machine, scalar first.
std::span<const Backend> available_backends();

// The backend in use: the fastest available one, unless overridden by the
// HOROSVM_BACKEND environment variable or force_backend().
const Backend& active_backend();

// Overrides the active backend by name ("scalar", "avx2", "neon"). Returns
// false if the named backend is unknown or unusable here. Not thread-safe
// against concurrent active_backend() calls; intended for startup/tests.
bool force_backend(std::string_view name);

// Coordinate-major view of a point set with the per-sample quantities the
// Busemann closed form needs precomputed; labels are optional (+-1).
struct Batch {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> coords_cm;       // dim * count, coords_cm[d*count + i]
  std::vector<double> sq_norm;         // |x_i|^2
  std::vector<double> log_one_minus;   // log1p(-|x_i|^2)
  std::vector<double> label;           // y_i in {-1.0, +1.0}; may be empty

  // rows is count*dim row-major (sample-major), as stored by datasets.
  static Batch from_rows(std::span<const double> rows, std::size_t count, std::size_t dim);

  std::span<const double> column(std::size_t d) const {
    return {coords_cm.data() + d * count, count};
  }
};

// Busemann levels of every sample against direction w (any vector, typically
// unit): lambda[i] = log1p(-|x_i|^2) - log(|w - x_i|^2). When sq_dist is
// non-empty it receives |w - x_i|^2.
void busemann_levels(const Batch& batch, std::span<const double> w,
                     std::span<double> lambda, std::span<double> sq_dist);

}  // namespace horosvm::kernels
