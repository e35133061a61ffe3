#include "horosvm/geometry.hpp"

#include <cmath>
#include <utility>

#include "horosvm/vec.hpp"

namespace horosvm::geometry {

namespace {

// Mobius addition on the ball:
//   a (+) b = ((1 + 2<a,b> + |b|^2) a + (1 - |a|^2) b) / (1 + 2<a,b> + |a|^2 |b|^2)
std::vector<double> mobius_add(std::span<const double> a, std::span<const double> b) {
  const double ab = vec::dot(a, b);
  const double na = vec::sq_norm(a);
  const double nb = vec::sq_norm(b);
  const double den = 1.0 + 2.0 * ab + na * nb;
  const double ca = (1.0 + 2.0 * ab + nb) / den;
  const double cb = (1.0 - na) / den;
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = ca * a[i] + cb * b[i];
  return out;
}

}  // namespace

PoincarePoint::PoincarePoint(std::vector<double> coords)
    : coords_(std::move(coords)), sq_norm_(vec::sq_norm(coords_)) {
  if (coords_.empty()) throw InvariantError("PoincarePoint requires dimension >= 1");
  const double limit = 1.0 - kBoundaryEps;
  if (!(sq_norm_ < limit * limit)) {
    throw InvariantError("point norm " + std::to_string(std::sqrt(sq_norm_)) +
                         " is not strictly inside the unit ball");
  }
}

PoincarePoint PoincarePoint::origin(std::size_t dim) {
  return PoincarePoint(std::vector<double>(dim, 0.0));
}

IdealPoint::IdealPoint(std::vector<double> direction) : dir_(std::move(direction)) {
  if (dir_.empty()) throw InvariantError("IdealPoint requires dimension >= 1");
  dir_ = vec::normalized(dir_);
}

Horosphere::Horosphere(double mu_in, IdealPoint omega_in, double b_in)
    : mu(mu_in), omega(std::move(omega_in)), b(b_in) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw InvariantError("horosphere scale mu must be positive and finite");
  }
  if (!std::isfinite(b)) throw InvariantError("horosphere offset b must be finite");
}

double geodesic_distance(const PoincarePoint& x, const PoincarePoint& y) {
  const double sq = vec::sq_dist(x.coords(), y.coords());
  const double den = (1.0 - x.sq_norm()) * (1.0 - y.sq_norm());
  return std::acosh(1.0 + 2.0 * sq / den);
}

double poincare_inner(const IdealPoint& omega, const PoincarePoint& x) {
  vec::check_same_dim(omega.direction(), x.coords());
  const double sq = vec::sq_dist(omega.direction(), x.coords());
  // log((1-|x|^2)/|omega-x|^2), split for precision near the boundary.
  return std::log1p(-x.sq_norm()) - std::log(sq);
}

double busemann(const IdealPoint& omega, const PoincarePoint& x) {
  return -poincare_inner(omega, x);
}

PoincarePoint geodesic_ray(const IdealPoint& omega, double t) {
  if (!(t >= 0.0)) throw InvariantError("geodesic_ray requires t >= 0");
  return PoincarePoint(vec::scaled(omega.direction(), std::tanh(t / 2.0)));
}

EuclideanSphere horosphere_euclidean_form(const Horosphere& h) {
  const double p = std::tanh(h.level() / 2.0);
  EuclideanSphere s;
  s.center = vec::scaled(h.omega.direction(), (1.0 + p) / 2.0);
  s.radius = (1.0 - p) / 2.0;
  return s;
}

PoincarePoint horospherical_projection(const IdealPoint& omega, const PoincarePoint& x) {
  const double lambda = poincare_inner(omega, x);
  return PoincarePoint(vec::scaled(omega.direction(), std::tanh(lambda / 2.0)));
}

double point_to_horosphere_distance(const PoincarePoint& x, const Horosphere& h) {
  return std::abs(h.mu * poincare_inner(h.omega, x) - h.b) / h.mu;
}

double conformal_factor(const PoincarePoint& x) { return 2.0 / (1.0 - x.sq_norm()); }

double riemannian_norm(const TangentVector& v) {
  return conformal_factor(v.base) * vec::norm(v.vec);
}

PoincarePoint exp_map(const TangentVector& v) {
  vec::check_same_dim(v.base.coords(), std::span<const double>(v.vec));
  const double n = vec::norm(v.vec);
  if (n == 0.0) return v.base;
  // Riemannian length of v is lambda_x * n; the geodesic from x with initial
  // velocity v reaches Euclidean radius tanh(length/2) in the x-centered frame.
  const double len = conformal_factor(v.base) * n;
  const auto step = vec::scaled(v.vec, std::tanh(len / 2.0) / n);
  return PoincarePoint(mobius_add(v.base.coords(), step));
}

TangentVector log_map(const PoincarePoint& x, const PoincarePoint& y) {
  vec::check_same_dim(x.coords(), y.coords());
  const auto neg_x = vec::scaled(x.coords(), -1.0);
  const auto m = mobius_add(neg_x, y.coords());
  const double n = vec::norm(m);
  if (n == 0.0) return TangentVector{x, std::vector<double>(x.dim(), 0.0)};
  const double scale = 2.0 * std::atanh(n) / (conformal_factor(x) * n);
  return TangentVector{x, vec::scaled(m, scale)};
}

}  // namespace horosvm::geometry
