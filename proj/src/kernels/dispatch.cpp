#include "horosvm/kernels.hpp"

#include <cmath>
#include <cstdlib>

#include "horosvm/errors.hpp"
#include "kernel_fns.hpp"

namespace horosvm::kernels {

namespace {

constexpr Backend kScalar{"scalar", &scalar::sq_dist_cols, &scalar::weighted_colsum};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Backend kAvx2{"avx2", &avx2::sq_dist_cols, &avx2::weighted_colsum};
bool avx2_usable() {
#if defined(__GNUC__) || defined(__clang__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
constexpr Backend kNeon{"neon", &neon::sq_dist_cols, &neon::weighted_colsum};
#endif

struct Registry {
  Backend entries[2];
  std::size_t size = 0;
  const Backend* active = nullptr;

  Registry() {
    entries[size++] = kScalar;
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_usable()) entries[size++] = kAvx2;
#endif
#if defined(__aarch64__) || defined(_M_ARM64)
    entries[size++] = kNeon;
#endif
    active = &entries[size - 1];  // best available; scalar if nothing else
    if (const char* env = std::getenv("HOROSVM_BACKEND")) {
      select(env);
    }
  }

  bool select(std::string_view name) {
    for (std::size_t i = 0; i < size; ++i) {
      if (name == entries[i].name) {
        active = &entries[i];
        return true;
      }
    }
    return false;
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

const Backend& scalar_backend() { return registry().entries[0]; }

std::span<const Backend> available_backends() {
  const Registry& r = registry();
  return {r.entries, r.size};
}

const Backend& active_backend() { return *registry().active; }

bool force_backend(std::string_view name) { return registry().select(name); }

Batch Batch::from_rows(std::span<const double> rows, std::size_t count, std::size_t dim) {
  if (rows.size() != count * dim) {
    throw DimensionMismatch("row buffer size does not match count*dim");
  }
  Batch b;
  b.count = count;
  b.dim = dim;
  b.coords_cm.resize(count * dim);
  b.sq_norm.resize(count);
  b.log_one_minus.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    double sq = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double v = rows[i * dim + d];
      b.coords_cm[d * count + i] = v;
      sq += v * v;
    }
    b.sq_norm[i] = sq;
    b.log_one_minus[i] = std::log1p(-sq);
  }
  return b;
}

void busemann_levels(const Batch& batch, std::span<const double> w,
                     std::span<double> lambda, std::span<double> sq_dist) {
  if (w.size() != batch.dim) throw DimensionMismatch("direction dimension mismatch");
  if (lambda.size() != batch.count) throw DimensionMismatch("lambda buffer size mismatch");
  const bool want_q = !sq_dist.empty();
  if (want_q && sq_dist.size() != batch.count) {
    throw DimensionMismatch("sq_dist buffer size mismatch");
  }
  // lambda doubles as the sq-dist scratch, then gets the log applied in place.
  double* q = want_q ? sq_dist.data() : lambda.data();
  active_backend().sq_dist_cols(batch.coords_cm.data(), batch.count, batch.dim,
                                w.data(), q);
  for (std::size_t i = 0; i < batch.count; ++i) {
    lambda[i] = batch.log_one_minus[i] - std::log(q[i]);
  }
}

}  // namespace horosvm::kernels
