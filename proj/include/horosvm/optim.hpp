#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "horosvm/manifold.hpp"

// Riemannian first-order solvers over the product manifold: gradient descent
// and Polak-Ribiere+ conjugate gradient, both with Armijo backtracking.
namespace horosvm::optim {

enum class Method { GD, CG };

struct OptimConfig {
  Method method = Method::CG;
  std::size_t max_iters = 2000;
  double grad_tol = 1e-7;
  double step_init = 1.0;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  // 0 means "sphere dimension", resolved at the start point.
  std::size_t cg_restart_period = 0;

  void validate() const;
};

struct OptimizerReport {
  std::size_t iters_used = 0;
  double final_loss = 0.0;
  double final_grad_norm = 0.0;
  bool converged = false;
  std::vector<double> loss_trace;
};

// Evaluates loss and its ambient gradient at a point.
using Objective = std::function<double(const manifold::ProductPoint&, manifold::AmbientGrad&)>;

// Minimizes the objective from `start`. Returns the last iterate (descent is
// monotone, so it is also the best) and diagnostics. Throws NonFiniteObjective
// if the loss or gradient stops being finite.
std::pair<manifold::ProductPoint, OptimizerReport> minimize(const Objective& objective,
                                                            const manifold::ProductPoint& start,
                                                            const OptimConfig& cfg);

}  // namespace horosvm::optim
