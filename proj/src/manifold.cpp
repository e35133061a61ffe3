#include "horosvm/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "horosvm/vec.hpp"

namespace horosvm::manifold {

SpherePoint::SpherePoint(std::vector<double> u) : u_(std::move(u)) {
  if (u_.empty()) throw InvariantError("SpherePoint requires dimension >= 1");
  u_ = vec::normalized(u_);
}

PositiveScalar::PositiveScalar(double value) : value_(value) {
  if (!(value_ > 0.0) || !std::isfinite(value_)) {
    throw InvariantError("PositiveScalar requires a finite positive value");
  }
}

ProductTangent ProductTangent::zero(std::size_t dim) {
  return ProductTangent{0.0, std::vector<double>(dim, 0.0), 0.0};
}

ProductTangent project_tangent(const ProductPoint& p, const AmbientGrad& g) {
  vec::check_same_dim(p.omega.u(), std::span<const double>(g.omega));
  ProductTangent t;
  t.d_mu = p.mu.value() * g.mu;
  t.d_b = p.b.value() * g.b;
  const double radial = vec::dot(p.omega.u(), g.omega);
  t.d_omega.assign(g.omega.begin(), g.omega.end());
  vec::axpy(-radial, p.omega.u(), t.d_omega);
  return t;
}

ProductPoint retract(const ProductPoint& p, const ProductTangent& v, double step) {
  auto u = vec::add(p.omega.u(), vec::scaled(v.d_omega, step));
  return ProductPoint{
      PositiveScalar(p.mu.value() * std::exp(step * v.d_mu)),
      SpherePoint(std::move(u)),
      PositiveScalar(p.b.value() * std::exp(step * v.d_b)),
  };
}

double inner(const ProductPoint&, const ProductTangent& v1, const ProductTangent& v2) {
  return v1.d_mu * v2.d_mu + vec::dot(v1.d_omega, v2.d_omega) + v1.d_b * v2.d_b;
}

ProductTangent transport(const ProductPoint&, const ProductPoint& p_to,
                         const ProductTangent& v) {
  ProductTangent t = v;
  const double radial = vec::dot(p_to.omega.u(), t.d_omega);
  vec::axpy(-radial, p_to.omega.u(), t.d_omega);
  return t;
}

SpherePoint geodesic_between_sphere_points(const SpherePoint& u1, const SpherePoint& u2,
                                           double t) {
  vec::check_same_dim(u1.u(), u2.u());
  const double c = std::clamp(vec::dot(u1.u(), u2.u()), -1.0, 1.0);
  const double theta = std::acos(c);
  constexpr double kPi = 3.14159265358979323846;
  if (theta > kPi - 1e-8) {
    throw AntipodalError("sphere geodesic between antipodal points is not unique");
  }
  if (theta < 1e-8) {
    // Nearly coincident endpoints: chord interpolation is exact to rounding.
    auto m = vec::scaled(u1.u(), 1.0 - t);
    vec::axpy(t, u2.u(), m);
    return SpherePoint(std::move(m));
  }
  const double s = std::sin(theta);
  auto m = vec::scaled(u1.u(), std::sin((1.0 - t) * theta) / s);
  vec::axpy(std::sin(t * theta) / s, u2.u(), m);
  return SpherePoint(std::move(m));
}

}  // namespace horosvm::manifold
