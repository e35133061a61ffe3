#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "horosvm/errors.hpp"

// Closed-form primitives of the Poincare ball model (curvature -1): geodesic
// distance, Busemann function / Poincare inner product, horosphere geometry,
// and the exponential/logarithm maps.
namespace horosvm::geometry {

// Points whose Euclidean norm reaches 1 - kBoundaryEps are rejected: the
// Busemann closed form loses all precision at the boundary.
inline constexpr double kBoundaryEps = 1e-9;

// A point strictly inside the open unit ball.
class PoincarePoint {
 public:
  explicit PoincarePoint(std::vector<double> coords);
  static PoincarePoint origin(std::size_t dim);

  std::span<const double> coords() const { return coords_; }
  std::size_t dim() const { return coords_.size(); }
  double sq_norm() const { return sq_norm_; }
  double operator[](std::size_t i) const { return coords_[i]; }

 private:
  std::vector<double> coords_;
  double sq_norm_;
};

// A unit vector on the boundary sphere; construction renormalizes near-unit
// inputs since embedding files carry rounding error.
class IdealPoint {
 public:
  explicit IdealPoint(std::vector<double> direction);

  std::span<const double> direction() const { return dir_; }
  std::size_t dim() const { return dir_.size(); }
  double operator[](std::size_t i) const { return dir_[i]; }

 private:
  std::vector<double> dir_;
};

// Decision-boundary horosphere pi_{mu,omega,b} = {z : mu<omega,z>_B - b = 0}.
// Level value b/mu is the Busemann level of every point on it.
struct Horosphere {
  Horosphere(double mu_in, IdealPoint omega_in, double b_in);

  double level() const { return b / mu; }

  double mu;
  IdealPoint omega;
  double b;
};

// Tangent vector at `base`, in ambient (Euclidean) coordinates.
struct TangentVector {
  PoincarePoint base;
  std::vector<double> vec;
};

// Euclidean description of a horosphere: the sphere internally tangent to the
// unit sphere at omega.
struct EuclideanSphere {
  std::vector<double> center;
  double radius;
};

// arccosh(1 + 2*|x-y|^2 / ((1-|x|^2)(1-|y|^2)))
double geodesic_distance(const PoincarePoint& x, const PoincarePoint& y);

// Closed form of lim_{t->inf} (d(gamma_omega(t), x) - t) with the ray anchored
// at the origin: -log((1-|x|^2) / |omega-x|^2).
double busemann(const IdealPoint& omega, const PoincarePoint& x);

// log((1-|x|^2) / |omega-x|^2); exactly -busemann(omega, x). Constant over any
// horosphere tangent at omega.
double poincare_inner(const IdealPoint& omega, const PoincarePoint& x);

// Unit-speed geodesic ray from the origin toward omega: tanh(t/2) * omega.
PoincarePoint geodesic_ray(const IdealPoint& omega, double t);

// Center/radius of the horosphere as a Euclidean sphere. With p = tanh(level/2):
// center = ((1+p)/2) * omega, radius = (1-p)/2.
EuclideanSphere horosphere_euclidean_form(const Horosphere& h);

// Projects x onto the ray toward omega along its own horosphere:
// tanh(lambda_x/2) * omega with lambda_x = poincare_inner(omega, x).
PoincarePoint horospherical_projection(const IdealPoint& omega, const PoincarePoint& x);

// |mu*<omega,x>_B - b| / mu.
double point_to_horosphere_distance(const PoincarePoint& x, const Horosphere& h);

// Conformal factor 2 / (1 - |x|^2) of the ball metric at x.
double conformal_factor(const PoincarePoint& x);

// Riemannian length of a tangent vector: conformal_factor(base) * |vec|.
double riemannian_norm(const TangentVector& v);

PoincarePoint exp_map(const TangentVector& v);
TangentVector log_map(const PoincarePoint& x, const PoincarePoint& y);

}  // namespace horosvm::geometry
