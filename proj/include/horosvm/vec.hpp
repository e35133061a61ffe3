#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "horosvm/errors.hpp"

// Small dense-vector helpers shared across modules. Hot batched paths live in
// kernels.hpp; these are for the one-point geometry/manifold code.
namespace horosvm::vec {

inline void check_same_dim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("vector dimensions differ: " + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()));
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  check_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sq_norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(sq_norm(a)); }

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
  check_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline std::vector<double> scaled(std::span<const double> a, double c) {
  std::vector<double> out(a.begin(), a.end());
  for (double& v : out) v *= c;
  return out;
}

// y += c * x
inline void axpy(double c, std::span<const double> x, std::span<double> y) {
  check_same_dim(x, std::span<const double>(y.data(), y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline std::vector<double> add(std::span<const double> a, std::span<const double> b) {
  check_same_dim(a, b);
  std::vector<double> out(a.begin(), a.end());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

inline std::vector<double> sub(std::span<const double> a, std::span<const double> b) {
  check_same_dim(a, b);
  std::vector<double> out(a.begin(), a.end());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
  return out;
}

// Returns a unit vector; throws InvariantError on (near-)zero input.
inline std::vector<double> normalized(std::span<const double> a, double eps = 0.0) {
  const double n = norm(a);
  if (!(n > eps)) throw InvariantError("cannot normalize a zero vector");
  return scaled(a, 1.0 / n);
}

}  // namespace horosvm::vec
