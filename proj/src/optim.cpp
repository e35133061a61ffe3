#include "horosvm/optim.hpp"

#include <algorithm>
#include <cmath>

#include "horosvm/vec.hpp"

namespace horosvm::optim {

using manifold::AmbientGrad;
using manifold::ProductPoint;
using manifold::ProductTangent;

namespace {

constexpr double kMinStep = 1e-14;

bool finite(double v) { return std::isfinite(v); }

bool finite(const AmbientGrad& g) {
  if (!finite(g.mu) || !finite(g.b)) return false;
  for (double v : g.omega) {
    if (!finite(v)) return false;
  }
  return true;
}

ProductTangent negated(const ProductTangent& v) {
  ProductTangent out = v;
  out.d_mu = -out.d_mu;
  out.d_b = -out.d_b;
  for (double& c : out.d_omega) c = -c;
  return out;
}

}  // namespace

void OptimConfig::validate() const {
  if (!(grad_tol >= 0.0)) throw InvariantError("grad_tol must be nonnegative");
  if (!(step_init > 0.0)) throw InvariantError("step_init must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) {
    throw InvariantError("armijo_c must lie in (0, 1)");
  }
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw InvariantError("backtrack_factor must lie in (0, 1)");
  }
}

std::pair<ProductPoint, OptimizerReport> minimize(const Objective& objective,
                                                  const ProductPoint& start,
                                                  const OptimConfig& cfg) {
  cfg.validate();
  const std::size_t restart_period =
      cfg.cg_restart_period > 0 ? cfg.cg_restart_period : std::max<std::size_t>(1, start.omega.dim());

  ProductPoint p = start;
  AmbientGrad ag;
  double loss = objective(p, ag);
  if (!finite(loss) || !finite(ag)) {
    throw NonFiniteObjective("objective is not finite at the start point");
  }

  OptimizerReport report;
  report.loss_trace.push_back(loss);

  ProductTangent grad = manifold::project_tangent(p, ag);
  double grad_sq = manifold::inner(p, grad, grad);

  if (std::sqrt(grad_sq) <= cfg.grad_tol) {
    report.final_loss = loss;
    report.final_grad_norm = std::sqrt(grad_sq);
    report.converged = true;
    return {p, report};
  }

  ProductTangent dir = negated(grad);
  double trial = cfg.step_init;
  std::size_t since_restart = 0;

  for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
    double slope = manifold::inner(p, grad, dir);
    if (slope >= 0.0) {
      // Not a descent direction (CG drift): restart to steepest descent.
      dir = negated(grad);
      slope = -grad_sq;
      since_restart = 0;
    }

    // Armijo backtracking: loss(next) <= loss - c * step * |<grad, dir>|.
    ProductPoint next = p;
    AmbientGrad next_ag;
    double next_loss = 0.0;
    double step = 0.0;
    const auto line_search = [&](double start_step) {
      // Cap the per-iteration move of the positive factors to 2 log-units
      // (a factor of e^2). Unbounded moves can jump straight onto the mu -> 0
      // plateau, where the log-coordinate gradient vanishes and the run would
      // stall far from the minimum.
      const double dmax = std::max(std::abs(dir.d_mu), std::abs(dir.d_b));
      const double step_cap = dmax > 0.0 ? 2.0 / dmax : 1e4;
      step = std::min(start_step, step_cap);
      while (step >= kMinStep) {
        next = manifold::retract(p, dir, step);
        next_loss = objective(next, next_ag);
        if (!finite(next_loss) || !finite(next_ag)) {
          throw NonFiniteObjective("objective became non-finite during line search");
        }
        if (next_loss <= loss + cfg.armijo_c * step * slope) return true;
        step *= cfg.backtrack_factor;
      }
      return false;
    };

    bool accepted = line_search(trial);
    if (!accepted && cfg.method == Method::CG && since_restart > 0) {
      // The CG direction may be useless at a hinge kink; retry once along
      // steepest descent before giving up.
      dir = negated(grad);
      slope = -grad_sq;
      since_restart = 0;
      accepted = line_search(trial);
    }
    if (!accepted) {
      // No admissible step above the floor: the iterate is stationary to
      // working precision (typical at a hinge kink).
      break;
    }

    ProductTangent new_grad = manifold::project_tangent(next, next_ag);
    const double new_grad_sq = manifold::inner(next, new_grad, new_grad);

    if (cfg.method == Method::CG) {
      ++since_restart;
      if (since_restart >= restart_period) {
        dir = negated(new_grad);
        since_restart = 0;
      } else {
        // Polak-Ribiere+ with projection transport of the previous gradient
        // and direction.
        ProductTangent g_prev = manifold::transport(p, next, grad);
        ProductTangent d_prev = manifold::transport(p, next, dir);
        double num = new_grad_sq - manifold::inner(next, new_grad, g_prev);
        double beta = std::max(0.0, num / grad_sq);
        dir = negated(new_grad);
        dir.d_mu += beta * d_prev.d_mu;
        dir.d_b += beta * d_prev.d_b;
        vec::axpy(beta, d_prev.d_omega, dir.d_omega);
      }
    } else {
      dir = negated(new_grad);
    }

    p = next;
    loss = next_loss;
    grad = new_grad;
    grad_sq = new_grad_sq;
    report.loss_trace.push_back(loss);
    report.iters_used = iter + 1;
    trial = std::clamp(2.0 * step, kMinStep, 1e4);

    if (std::sqrt(grad_sq) <= cfg.grad_tol) {
      report.converged = true;
      break;
    }
  }

  report.final_loss = loss;
  report.final_grad_norm = std::sqrt(grad_sq);
  return {p, report};
}

}  // namespace horosvm::optim
