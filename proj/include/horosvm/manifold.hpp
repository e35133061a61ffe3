#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "horosvm/errors.hpp"

// Riemannian structure of the parameter space R+ x S^{n-1} x R+. The positive
// factors live in log-coordinates, which makes positivity structural and the
// retraction exact; the sphere factor uses projection/normalization, first-order
// sufficient for GD/CG.
namespace horosvm::manifold {

// Unit vector on S^{n-1}; renormalized on construction.
class SpherePoint {
 public:
  explicit SpherePoint(std::vector<double> u);

  std::span<const double> u() const { return u_; }
  std::size_t dim() const { return u_.size(); }

 private:
  std::vector<double> u_;
};

// Strictly positive scalar; stored as the value, stepped in log-coordinates.
class PositiveScalar {
 public:
  explicit PositiveScalar(double value);

  double value() const { return value_; }

 private:
  double value_;
};

// A point (mu, omega, b) of the product manifold.
struct ProductPoint {
  PositiveScalar mu;
  SpherePoint omega;
  PositiveScalar b;
};

// Tangent vector: log-coordinate components for the positive factors, an
// ambient vector orthogonal to omega for the sphere factor.
struct ProductTangent {
  double d_mu = 0.0;
  std::vector<double> d_omega;
  double d_b = 0.0;

  static ProductTangent zero(std::size_t dim);
};

// Ambient gradient triple as produced by the loss functions: plain partial
// derivatives w.r.t. mu, the omega coordinates, and b.
struct AmbientGrad {
  double mu = 0.0;
  std::vector<double> omega;
  double b = 0.0;
};

// Riemannian gradient from the ambient one: sphere component projected onto
// the tangent space, positive factors chain-ruled into log-coordinates
// (d_u = value * d/d(value)).
ProductTangent project_tangent(const ProductPoint& p, const AmbientGrad& g);

// mu' = mu*exp(step*d_mu), omega' = normalize(omega + step*d_omega),
// b' = b*exp(step*d_b).
ProductPoint retract(const ProductPoint& p, const ProductTangent& v, double step);

// Product metric: Euclidean on the sphere tangent, Euclidean in log-coordinates
// on the positive factors.
double inner(const ProductPoint& p, const ProductTangent& v1, const ProductTangent& v2);

// Moves v from p_from to p_to: sphere component re-projected onto the tangent
// space at p_to, log-coordinate components unchanged.
ProductTangent transport(const ProductPoint& p_from, const ProductPoint& p_to,
                         const ProductTangent& v);

// Slerp between two unit vectors; throws AntipodalError within 1e-8 of pi.
SpherePoint geodesic_between_sphere_points(const SpherePoint& u1, const SpherePoint& u2,
                                           double t);

}  // namespace horosvm::manifold
