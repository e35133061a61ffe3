#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "horosvm/geometry.hpp"
#include "horosvm/kernels.hpp"
#include "support/oracles.hpp"

using namespace horosvm;
using namespace horosvm::kernels;

TEST_SUITE_BEGIN("kernels");

namespace {

std::vector<double> random_rows(std::size_t count, std::size_t dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-0.7, 0.7);
  std::vector<double> rows(count * dim);
  for (double& v : rows) v = unif(rng) / std::sqrt(static_cast<double>(dim));
  return rows;
}

}  // namespace

TEST_CASE("backend registry") {
  const auto backends = available_backends();
  REQUIRE(backends.size() >= 1);
  CHECK(std::string(backends[0].name) == "scalar");
  CHECK(force_backend("no-such-backend") == false);
  CHECK(force_backend(active_backend().name) == true);
#if defined(__x86_64__)
  // This project's CI machines all have AVX2; keep a canary so a silently
  // scalar-only build gets noticed.
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    CHECK(backends.size() == 2);
  }
#endif
}

TEST_CASE("SIMD backends match the scalar reference") {
  std::mt19937_64 rng(101);
  const auto& ref = scalar_backend();
  for (std::size_t count : {1u, 2u, 3u, 5u, 8u, 17u, 64u, 1003u}) {
    for (std::size_t dim : {1u, 2u, 3u, 5u, 10u, 16u}) {
      const auto rows = random_rows(count, dim, rng);
      const auto batch = Batch::from_rows(rows, count, dim);
      const auto w = testing::random_unit(dim, rng);
      std::vector<double> coef(count);
      std::uniform_real_distribution<double> cdist(-2.0, 2.0);
      for (double& c : coef) c = cdist(rng);

      std::vector<double> q_ref(count), colsum_ref(dim);
      ref.sq_dist_cols(batch.coords_cm.data(), count, dim, w.data(), q_ref.data());
      ref.weighted_colsum(batch.coords_cm.data(), count, dim, coef.data(),
                          colsum_ref.data());

      for (const auto& backend : available_backends()) {
        std::vector<double> q(count), colsum(dim);
        backend.sq_dist_cols(batch.coords_cm.data(), count, dim, w.data(), q.data());
        backend.weighted_colsum(batch.coords_cm.data(), count, dim, coef.data(),
                                colsum.data());
        for (std::size_t i = 0; i < count; ++i) {
          CHECK(std::abs(q[i] - q_ref[i]) <=
                1e-11 * std::max({1.0, std::abs(q[i]), std::abs(q_ref[i])}));
        }
        for (std::size_t d = 0; d < dim; ++d) {
          CHECK(std::abs(colsum[d] - colsum_ref[d]) <=
                1e-11 * std::max({1.0, std::abs(colsum[d]), std::abs(colsum_ref[d])}));
        }
      }
    }
  }
}

TEST_CASE("batch layout and busemann levels agree with the geometry module") {
  std::mt19937_64 rng(103);
  const std::size_t count = 37, dim = 4;
  const auto rows = random_rows(count, dim, rng);
  const auto batch = Batch::from_rows(rows, count, dim);

  CHECK(batch.column(1).size() == count);
  CHECK(batch.column(1)[3] == rows[3 * dim + 1]);

  const auto wdir = testing::random_unit(dim, rng);
  geometry::IdealPoint omega(wdir);
  std::vector<double> lambda(count), q(count);
  busemann_levels(batch, wdir, lambda, q);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> coords(rows.begin() + i * dim, rows.begin() + (i + 1) * dim);
    const geometry::PoincarePoint p(coords);
    CHECK(lambda[i] ==
          doctest::Approx(geometry::poincare_inner(omega, p)).epsilon(1e-12));
  }
}

TEST_CASE("busemann levels accept non-unit directions") {
  std::mt19937_64 rng(107);
  const auto rows = random_rows(9, 3, rng);
  const auto batch = Batch::from_rows(rows, 9, 3);
  std::vector<double> w = {0.3, -1.4, 0.2};
  std::vector<double> lambda(9);
  busemann_levels(batch, w, lambda, {});
  for (std::size_t i = 0; i < 9; ++i) {
    double q = 0.0, sq = 0.0;
    for (int d = 0; d < 3; ++d) {
      const double diff = w[d] - rows[i * 3 + d];
      q += diff * diff;
      sq += rows[i * 3 + d] * rows[i * 3 + d];
    }
    CHECK(lambda[i] == doctest::Approx(std::log1p(-sq) - std::log(q)).epsilon(1e-13));
  }
}

TEST_SUITE_END();
