#include "horosvm/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "horosvm/vec.hpp"

namespace horosvm::model {

using manifold::AmbientGrad;
using manifold::ProductPoint;

namespace {

std::vector<double> random_unit_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  while (true) {
    for (double& c : v) c = normal(rng);
    const double n = vec::norm(v);
    if (n > 1e-12) {
      for (double& c : v) c /= n;
      return v;
    }
  }
}

// +-1 labels as doubles; throws unless both classes are present.
std::vector<double> binary_labels(const data::LabeledDataset& dataset) {
  std::vector<double> y(dataset.count());
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < dataset.count(); ++i) {
    const int v = data::parse_binary_label(dataset.label(i));
    if (v == 0) {
      throw InvariantError("binary training requires +-1 labels, got '" +
                           dataset.label(i) + "'");
    }
    y[i] = v;
    (v > 0 ? pos : neg) = true;
  }
  if (!pos || !neg) throw SingleClassDataset("both +-1 labels must be present");
  return y;
}

}  // namespace

double decision_value(const HoroClassifier& clf, const geometry::PoincarePoint& x) {
  return clf.boundary.mu * geometry::poincare_inner(clf.boundary.omega, x) -
         clf.boundary.b;
}

BatchObjective::BatchObjective(const data::LabeledDataset& dataset, LossKind kind, double c)
    : kind_(kind), c_(c) {
  if (dataset.count() == 0) throw EmptyDataset("empty dataset");
  std::vector<double> rows(dataset.coords().begin(), dataset.coords().end());
  const std::size_t dim = dataset.dim();
  for (std::size_t i = 0; i < dataset.count(); ++i) {
    std::span<double> row(rows.data() + i * dim, dim);
    if (vec::sq_norm(row) == 0.0) {
      std::cerr << "horosvm: warning: sample " << i
                << " at exact ball center perturbed by 1e-12\n";
      row[0] = 1e-12;
    }
  }
  batch_ = kernels::Batch::from_rows(rows, dataset.count(), dim);
  batch_.label = binary_labels(dataset);
  lambda_.resize(batch_.count);
  sq_dist_.resize(batch_.count);
  coef_.resize(batch_.count);
}

double BatchObjective::eval(const ProductPoint& p, AmbientGrad& grad) {
  return eval_raw(p.mu.value(), p.omega.u(), p.b.value(), grad);
}

double BatchObjective::eval_raw(double mu, std::span<const double> omega, double b,
                                AmbientGrad& grad) {
  const std::size_t n = batch_.count;

  kernels::busemann_levels(batch_, omega, lambda_, sq_dist_);

  double hinge_sum = 0.0;
  double d_mu = 0.0;
  double d_b = 0.0;
  const double threshold = kind_ == LossKind::HoroSVM ? 1.0 : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = batch_.label[i];
    const double s = y * (mu * lambda_[i] - b);
    if (s < threshold) {
      hinge_sum += threshold - s;
      d_mu -= y * lambda_[i];
      d_b += y;
      coef_[i] = 2.0 * y * mu / sq_dist_[i];
    } else {
      coef_[i] = 0.0;
    }
  }

  const double w = kind_ == LossKind::HoroSVM ? c_ : 1.0 / static_cast<double>(n);
  double loss = w * hinge_sum;
  d_mu *= w;
  d_b *= w;
  double coef_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    coef_[i] *= w;
    coef_total += coef_[i];
  }
  if (kind_ == LossKind::HoroSVM) {
    loss += 0.5 * mu * mu;
    d_mu += mu;
  }

  grad.mu = d_mu;
  grad.b = d_b;
  grad.omega.resize(batch_.dim);
  kernels::active_backend().weighted_colsum(batch_.coords_cm.data(), n, batch_.dim,
                                            coef_.data(), grad.omega.data());
  for (std::size_t d = 0; d < batch_.dim; ++d) {
    grad.omega[d] = coef_total * omega[d] - grad.omega[d];
  }
  return loss;
}

BatchObjective::SubdiffPieces BatchObjective::subdifferential(const ProductPoint& p,
                                                              double band) {
  const double mu = p.mu.value();
  const double b = p.b.value();
  const auto omega = p.omega.u();
  const std::size_t n = batch_.count;
  const std::size_t dim = batch_.dim;
  const double threshold = kind_ == LossKind::HoroSVM ? 1.0 : 0.0;
  const double w = kind_ == LossKind::HoroSVM ? c_ : 1.0 / static_cast<double>(n);

  kernels::busemann_levels(batch_, omega, lambda_, sq_dist_);

  SubdiffPieces out;
  out.base.omega.assign(dim, 0.0);
  double coef_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = batch_.label[i];
    const double s = y * (mu * lambda_[i] - b);
    const double violation = threshold - s;
    if (violation > band) {
      out.base.mu -= w * y * lambda_[i];
      out.base.b += w * y;
      coef_[i] = w * 2.0 * y * mu / sq_dist_[i];
      coef_total += coef_[i];
    } else {
      coef_[i] = 0.0;
      if (violation >= -band) {
        AmbientGrad g;
        g.mu = -w * y * lambda_[i];
        g.b = w * y;
        g.omega.resize(dim);
        const double c = w * 2.0 * y * mu / sq_dist_[i];
        for (std::size_t d = 0; d < dim; ++d) {
          g.omega[d] = c * (omega[d] - batch_.coords_cm[d * n + i]);
        }
        out.kink.push_back(std::move(g));
      }
    }
  }
  std::vector<double> colsum(dim);
  kernels::active_backend().weighted_colsum(batch_.coords_cm.data(), n, dim, coef_.data(),
                                            colsum.data());
  for (std::size_t d = 0; d < dim; ++d) {
    out.base.omega[d] = coef_total * omega[d] - colsum[d];
  }
  if (kind_ == LossKind::HoroSVM) out.base.mu += mu;
  return out;
}

std::pair<double, AmbientGrad> perceptron_loss(const ProductPoint& p,
                                               const data::LabeledDataset& dataset) {
  BatchObjective obj(dataset, LossKind::Perceptron, 0.0);
  AmbientGrad g;
  const double loss = obj.eval(p, g);
  return {loss, std::move(g)};
}

std::pair<double, AmbientGrad> horosvm_loss(const ProductPoint& p,
                                            const data::LabeledDataset& dataset, double c) {
  BatchObjective obj(dataset, LossKind::HoroSVM, c);
  AmbientGrad g;
  const double loss = obj.eval(p, g);
  return {loss, std::move(g)};
}

double margin(const geometry::Horosphere& h, const data::LabeledDataset& dataset) {
  if (dataset.count() == 0) throw EmptyDataset("empty dataset");
  const auto y = binary_labels(dataset);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dataset.count(); ++i) {
    const double lambda = geometry::poincare_inner(h.omega, dataset.point(i));
    m = std::min(m, y[i] * (h.mu * lambda - h.b) / h.mu);
  }
  return m;
}

double margin(const ProductPoint& p, const data::LabeledDataset& dataset) {
  return margin(geometry::Horosphere(p.mu.value(),
                                     geometry::IdealPoint(std::vector<double>(
                                         p.omega.u().begin(), p.omega.u().end())),
                                     p.b.value()),
                dataset);
}

namespace {

// Exact minimizer of the HoroSVM loss along the scale ray (mu, b) -> (c mu, c b).
// The boundary level b/mu is unchanged, so the slacks s_i = y (mu lambda - b)
// scale linearly and f(c) = mu^2 c^2 / 2 + C sum max(0, 1 - c s_i) is a strictly
// convex piecewise quadratic; gradient descent alone stalls at the activation
// kinks this step resolves. c is clamped to e^{+-2} per application, matching
// the optimizer's per-iteration cap on log-coordinate moves.
double optimal_scale(double mu, std::vector<double>& slacks, double c_weight) {
  double active_sum = 0.0;
  for (double s : slacks) active_sum += s;

  // Positive slacks deactivate as c grows past 1/s, largest s first.
  std::sort(slacks.begin(), slacks.end(), std::greater<>());
  const double mu_sq = mu * mu;
  double c_lo = 0.0;
  double best = 1.0;
  std::size_t next = 0;
  while (true) {
    const double c_hi = (next < slacks.size() && slacks[next] > 0.0)
                            ? 1.0 / slacks[next]
                            : std::numeric_limits<double>::infinity();
    // f'(c) = mu^2 c - C * active_sum on [c_lo, c_hi).
    const double vertex = c_weight * active_sum / mu_sq;
    if (vertex <= c_lo) {
      best = c_lo;
      break;
    }
    if (vertex < c_hi) {
      best = vertex;
      break;
    }
    if (next >= slacks.size() || !(slacks[next] > 0.0)) {
      best = c_hi;  // unreachable: vertex < inf once no positives remain
      break;
    }
    active_sum -= slacks[next];
    c_lo = c_hi;
    ++next;
  }
  return std::clamp(best, std::exp(-2.0), std::exp(2.0));
}

// Exact minimizer over b alone (mu, omega fixed): the hinge sum is piecewise
// linear and convex in b, so the optimum sits at a breakpoint where the slope
// changes sign. Clamped to e^{+-2} around the current b.
double optimal_offset(double mu, double b, std::span<const double> lambda,
                      std::span<const double> label) {
  // Sample i is hinge-active iff y_i (mu lambda_i - b) < 1. Crossing the
  // breakpoint upward in b adds +1 to the slope/C for either label.
  std::vector<double> breakpoints;
  breakpoints.reserve(lambda.size());
  double slope = 0.0;  // in units of C, at b -> -inf
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (label[i] > 0.0) {
      breakpoints.push_back(mu * lambda[i] - 1.0);  // activates above
    } else {
      breakpoints.push_back(mu * lambda[i] + 1.0);  // deactivates above
      slope -= 1.0;
    }
  }
  std::sort(breakpoints.begin(), breakpoints.end());
  double best = breakpoints.back();
  for (double bp : breakpoints) {
    slope += 1.0;
    if (slope >= 0.0) {
      best = bp;
      break;
    }
  }
  return std::clamp(best, b * std::exp(-2.0), b * std::exp(2.0));
}

ProductPoint scale_polished(const ProductPoint& p, const kernels::Batch& batch,
                            std::vector<double>& lambda, double c_weight) {
  kernels::busemann_levels(batch, p.omega.u(), lambda, {});
  const double mu = p.mu.value();
  double b = optimal_offset(mu, p.b.value(), lambda, batch.label);
  std::vector<double> slacks(batch.count);
  for (std::size_t i = 0; i < batch.count; ++i) {
    slacks[i] = batch.label[i] * (mu * lambda[i] - b);
  }
  const double c = optimal_scale(mu, slacks, c_weight);
  return ProductPoint{manifold::PositiveScalar(c * mu), p.omega,
                      manifold::PositiveScalar(c * b)};
}

struct RefineOutcome {
  double loss = 0.0;
  double subgrad_norm = 0.0;
  std::size_t iters = 0;
  bool stationary = false;
};

// Steepest descent for the piecewise-smooth loss. Plain gradient steps stall
// at hinge kinks (the inactive-convention gradient stops being a descent
// direction once a kink sample activates); the minimum-norm element of the
// subdifferential is a guaranteed descent direction whenever the point is not
// stationary, so iterating on it converges where Armijo-on-the-gradient quits.
RefineOutcome kink_refine(BatchObjective& obj, ProductPoint& p, double grad_tol,
                          std::size_t max_iters, std::vector<double>& trace) {
  using manifold::ProductTangent;
  constexpr double kBand = 1e-9;
  constexpr double kMinStep = 1e-14;

  AmbientGrad scratch;
  RefineOutcome out;
  out.loss = obj.eval(p, scratch);
  double trial = 1.0;

  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    auto pieces = obj.subdifferential(p, kBand);
    ProductTangent r = manifold::project_tangent(p, pieces.base);
    std::vector<ProductTangent> kinks;
    kinks.reserve(pieces.kink.size());
    for (const auto& g : pieces.kink) kinks.push_back(manifold::project_tangent(p, g));

    // Min-norm convex combination base + sum theta_i kink_i over [0,1]^m by
    // cyclic coordinate descent on theta.
    std::vector<double> theta(kinks.size(), 0.0);
    for (int sweep = 0; sweep < 50 && !kinks.empty(); ++sweep) {
      double moved = 0.0;
      for (std::size_t i = 0; i < kinks.size(); ++i) {
        const double tn2 = manifold::inner(p, kinks[i], kinks[i]);
        if (!(tn2 > 0.0)) continue;
        const double want =
            std::clamp(theta[i] - manifold::inner(p, r, kinks[i]) / tn2, 0.0, 1.0);
        const double delta = want - theta[i];
        if (delta != 0.0) {
          theta[i] = want;
          r.d_mu += delta * kinks[i].d_mu;
          r.d_b += delta * kinks[i].d_b;
          vec::axpy(delta, kinks[i].d_omega, r.d_omega);
          moved += std::abs(delta);
        }
      }
      if (moved < 1e-14) break;
    }

    const double rn2 = manifold::inner(p, r, r);
    out.subgrad_norm = std::sqrt(rn2);
    out.iters = iter;
    if (out.subgrad_norm <= grad_tol) {
      out.stationary = true;
      return out;
    }

    ProductTangent dir = r;
    dir.d_mu = -dir.d_mu;
    dir.d_b = -dir.d_b;
    for (double& c : dir.d_omega) c = -c;

    const double dmax = std::max(std::abs(dir.d_mu), std::abs(dir.d_b));
    double step = std::min(trial, dmax > 0.0 ? 2.0 / dmax : 1e4);
    bool accepted = false;
    while (step >= kMinStep) {
      const auto next = manifold::retract(p, dir, step);
      const double next_loss = obj.eval(next, scratch);
      // The one-sided derivative along -r is at most -|r|^2.
      if (next_loss <= out.loss - 1e-4 * step * rn2) {
        p = next;
        out.loss = next_loss;
        trace.push_back(next_loss);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return out;
    trial = std::clamp(2.0 * step, kMinStep, 1e4);
  }
  return out;
}

}  // namespace

std::vector<RestartResult> train_binary_restarts(const data::LabeledDataset& dataset,
                                                 const TrainConfig& cfg, LossKind kind) {
  if (cfg.restarts == 0) throw InvariantError("restarts must be >= 1");
  if (!(cfg.c > 0.0)) throw InvariantError("soft-margin tradeoff c must be positive");
  BatchObjective objective(dataset, kind, cfg.c);
  const auto fn = [&objective](const ProductPoint& p, AmbientGrad& g) {
    return objective.eval(p, g);
  };

  constexpr std::size_t kPolishRounds = 20;
  std::vector<double> lambda(dataset.count());
  std::vector<RestartResult> results;
  results.reserve(cfg.restarts);
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    std::mt19937_64 rng(cfg.seed + r);
    ProductPoint p{manifold::PositiveScalar(1.0),
                   manifold::SpherePoint(random_unit_vector(dataset.dim(), rng)),
                   manifold::PositiveScalar(1.0)};
    optim::OptimizerReport total;
    AmbientGrad scratch;
    for (std::size_t round = 0; round < kPolishRounds; ++round) {
      auto [next, report] = optim::minimize(fn, p, cfg.optim);
      p = std::move(next);
      total.iters_used += report.iters_used;
      total.loss_trace.insert(total.loss_trace.end(), report.loss_trace.begin(),
                              report.loss_trace.end());
      total.final_loss = report.final_loss;
      total.final_grad_norm = report.final_grad_norm;
      total.converged = report.converged;

      if (kind == LossKind::HoroSVM) {
        auto polished = scale_polished(p, objective.batch(), lambda, cfg.c);
        const double polished_loss = objective.eval(polished, scratch);
        if (polished_loss < total.final_loss) {
          p = std::move(polished);
          total.final_loss = polished_loss;
          total.loss_trace.push_back(polished_loss);
        }
      }

      const double before = total.final_loss;
      const auto refined = kink_refine(objective, p, cfg.optim.grad_tol,
                                       cfg.optim.max_iters, total.loss_trace);
      total.iters_used += refined.iters;
      total.final_loss = refined.loss;
      total.final_grad_norm = refined.subgrad_norm;
      if (refined.stationary) {
        total.converged = true;
        break;
      }
      if (before - refined.loss < 1e-12) break;
    }
    results.push_back(RestartResult{std::move(p), std::move(total)});
  }
  return results;
}

std::pair<HoroClassifier, optim::OptimizerReport> train_binary(
    const data::LabeledDataset& dataset, const TrainConfig& cfg, LossKind kind) {
  auto results = train_binary_restarts(dataset, cfg, kind);
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].report.final_loss < results[best].report.final_loss) best = i;
  }
  const ProductPoint& p = results[best].point;
  HoroClassifier clf{geometry::Horosphere(
      p.mu.value(),
      geometry::IdealPoint(std::vector<double>(p.omega.u().begin(), p.omega.u().end())),
      p.b.value())};
  return {std::move(clf), std::move(results[best].report)};
}

BinaryModel train_binary_model(const data::LabeledDataset& dataset, const TrainConfig& cfg,
                               LossKind kind) {
  std::string pos = "+1";
  std::string neg = "-1";
  for (const auto& l : dataset.labels()) {
    (data::parse_binary_label(l) > 0 ? pos : neg) = l;
  }
  auto train_data = dataset;
  if (cfg.downsample_ratio > 0.0) {
    train_data = downsample_majority(dataset, cfg.downsample_ratio, cfg.seed);
  }
  auto clf = train_binary(train_data, cfg, kind).first;
  return BinaryModel{std::move(clf), std::move(pos), std::move(neg), dataset.dim()};
}

OvRModel train_ovr(const data::LabeledDataset& dataset, const TrainConfig& cfg) {
  const auto classes = dataset.classes();
  if (classes.size() < 2) {
    throw SingleClassDataset("one-vs-rest requires >= 2 distinct classes");
  }
  OvRModel model;
  model.classes = classes;
  model.dim = dataset.dim();
  model.per_class.reserve(classes.size());
  for (std::size_t k = 0; k < classes.size(); ++k) {
    std::vector<std::string> labels(dataset.count());
    for (std::size_t i = 0; i < dataset.count(); ++i) {
      labels[i] = dataset.label(i) == classes[k] ? "+1" : "-1";
    }
    auto split = dataset.with_labels(std::move(labels));
    if (!data::is_binary_pm1(split)) {
      throw SingleClassDataset("class '" + classes[k] + "' covers the whole dataset");
    }
    TrainConfig per_class_cfg = cfg;
    per_class_cfg.seed = cfg.seed + 10007 * (k + 1);
    if (cfg.downsample_ratio > 0.0) {
      split = downsample_majority(split, cfg.downsample_ratio, per_class_cfg.seed);
    }
    model.per_class.push_back(train_binary(split, per_class_cfg, LossKind::HoroSVM).first);
  }
  return model;
}

std::vector<int> predict(const HoroClassifier& clf, const data::LabeledDataset& points) {
  if (points.dim() != clf.boundary.omega.dim()) {
    throw DimensionMismatch("point dimension does not match classifier");
  }
  auto batch = kernels::Batch::from_rows(points.coords(), points.count(), points.dim());
  std::vector<double> lambda(batch.count);
  kernels::busemann_levels(batch, clf.boundary.omega.direction(), lambda, {});
  std::vector<int> out(batch.count);
  for (std::size_t i = 0; i < batch.count; ++i) {
    out[i] = clf.boundary.mu * lambda[i] - clf.boundary.b >= 0.0 ? 1 : -1;
  }
  return out;
}

std::vector<std::string> predict(const OvRModel& model, const data::LabeledDataset& points) {
  if (model.per_class.empty()) throw InvariantError("empty OvR model");
  if (points.dim() != model.dim) {
    throw DimensionMismatch("point dimension does not match model");
  }
  auto batch = kernels::Batch::from_rows(points.coords(), points.count(), points.dim());
  std::vector<double> lambda(batch.count);
  std::vector<double> best_score(batch.count, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> best_class(batch.count, 0);
  for (std::size_t k = 0; k < model.per_class.size(); ++k) {
    const auto& h = model.per_class[k].boundary;
    kernels::busemann_levels(batch, h.omega.direction(), lambda, {});
    for (std::size_t i = 0; i < batch.count; ++i) {
      // Signed distance (Prop. 1): raw scores across classifiers carry
      // incommensurate mu scales.
      const double score = lambda[i] - h.b / h.mu;
      if (score > best_score[i]) {
        best_score[i] = score;
        best_class[i] = k;
      }
    }
  }
  std::vector<std::string> out(batch.count);
  for (std::size_t i = 0; i < batch.count; ++i) out[i] = model.classes[best_class[i]];
  return out;
}

std::vector<std::string> predict_labels(const Model& model, const data::LabeledDataset& points) {
  if (const auto* bin = std::get_if<BinaryModel>(&model)) {
    const auto signs = predict(bin->clf, points);
    std::vector<std::string> out(signs.size());
    for (std::size_t i = 0; i < signs.size(); ++i) {
      out[i] = signs[i] > 0 ? bin->pos_label : bin->neg_label;
    }
    return out;
  }
  return predict(std::get<OvRModel>(model), points);
}

data::LabeledDataset downsample_majority(const data::LabeledDataset& dataset, double ratio,
                                         std::uint64_t seed) {
  if (!(ratio > 0.0)) throw InvariantError("downsample ratio must be positive");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < dataset.count(); ++i) {
    (data::parse_binary_label(dataset.label(i)) > 0 ? pos : neg).push_back(i);
  }
  auto& majority = pos.size() >= neg.size() ? pos : neg;
  const auto& minority = pos.size() >= neg.size() ? neg : pos;
  const auto cap = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(ratio * static_cast<double>(minority.size()))));
  if (majority.size() > cap) {
    std::mt19937_64 rng(seed);
    std::shuffle(majority.begin(), majority.end(), rng);
    majority.resize(cap);
  }
  std::vector<std::size_t> keep;
  keep.reserve(majority.size() + minority.size());
  keep.insert(keep.end(), pos.begin(), pos.end());
  keep.insert(keep.end(), neg.begin(), neg.end());
  std::sort(keep.begin(), keep.end());
  return dataset.subset(keep);
}

bool in_common_hemisphere(std::span<const double> omega, const data::LabeledDataset& dataset) {
  const auto y = binary_labels(dataset);
  for (std::size_t i = 0; i < dataset.count(); ++i) {
    if (!(y[i] * vec::dot(dataset.point_view(i), omega) > 0.0)) return false;
  }
  return true;
}

ConvexityReport convexity_probe(const geometry::PoincarePoint& x, int y,
                                std::size_t n_geodesics, std::uint64_t seed) {
  if (x.sq_norm() == 0.0) {
    throw DegeneratePoint("convexity probe requires a sample away from the ball center");
  }
  if (y != 1 && y != -1) throw InvariantError("label must be +-1");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto xs = x.coords();

  // Single-sample perceptron loss at fixed (mu, b).
  const auto loss = [&](const manifold::SpherePoint& nu, double mu, double b) {
    const double lambda = std::log1p(-x.sq_norm()) - std::log(vec::sq_dist(nu.u(), xs));
    return std::max(0.0, -static_cast<double>(y) * (mu * lambda - b));
  };

  // Uniform unit vector conditioned on the requested side of the hemisphere
  // boundary {z : x^T z = 0}.
  const auto draw_side = [&](double side) {
    while (true) {
      auto u = random_unit_vector(x.dim(), rng);
      const double h = static_cast<double>(y) * vec::dot(xs, u);
      if (h * side < 0.0) {
        for (double& c : u) c = -c;
      }
      if (std::abs(h) > 1e-6) return manifold::SpherePoint(std::move(u));
    }
  };

  ConvexityReport report;
  report.segments = n_geodesics;
  for (int pass = 0; pass < 2; ++pass) {
    const double side = pass == 0 ? +1.0 : -1.0;  // A then B
    for (std::size_t s = 0; s < n_geodesics; ++s) {
      const auto u1 = draw_side(side);
      const auto u2 = draw_side(side);
      const double mu = 0.5 + 1.5 * unif(rng);
      const double b = 0.5 + 1.5 * unif(rng);
      const auto mid = manifold::geodesic_between_sphere_points(u1, u2, 0.5);
      const double l_mid = loss(mid, mu, b);
      const double l_avg = 0.5 * (loss(u1, mu, b) + loss(u2, mu, b));
      if (pass == 0 && l_mid > l_avg + report.tolerance) ++report.convex_violations;
      if (pass == 1 && l_mid < l_avg - report.tolerance) ++report.concave_violations;
    }
  }
  return report;
}

void save_model(const std::string& path, const Model& model) {
  nlohmann::json j;
  const auto dump_clf = [](const HoroClassifier& c) {
    nlohmann::json e;
    e["mu"] = c.boundary.mu;
    e["omega"] = std::vector<double>(c.boundary.omega.direction().begin(),
                                     c.boundary.omega.direction().end());
    e["b"] = c.boundary.b;
    return e;
  };
  if (const auto* bin = std::get_if<BinaryModel>(&model)) {
    j["kind"] = "binary";
    j["dim"] = bin->dim;
    j["classes"] = {bin->pos_label, bin->neg_label};
    j["classifiers"] = {dump_clf(bin->clf)};
  } else {
    const auto& ovr = std::get<OvRModel>(model);
    j["kind"] = "ovr";
    j["dim"] = ovr.dim;
    j["classes"] = ovr.classes;
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : ovr.per_class) cs.push_back(dump_clf(c));
    j["classifiers"] = std::move(cs);
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open model file for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw Error("failed writing model to " + path);
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("invalid model JSON: ") + e.what());
  }
  const auto parse_clf = [](const nlohmann::json& e) {
    return HoroClassifier{geometry::Horosphere(
        e.at("mu").get<double>(),
        geometry::IdealPoint(e.at("omega").get<std::vector<double>>()),
        e.at("b").get<double>())};
  };
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "binary") {
      return BinaryModel{parse_clf(j.at("classifiers").at(0)),
                         j.at("classes").at(0).get<std::string>(),
                         j.at("classes").at(1).get<std::string>(),
                         j.at("dim").get<std::size_t>()};
    }
    if (kind == "ovr") {
      OvRModel m;
      m.dim = j.at("dim").get<std::size_t>();
      m.classes = j.at("classes").get<std::vector<std::string>>();
      for (const auto& e : j.at("classifiers")) m.per_class.push_back(parse_clf(e));
      if (m.classes.size() != m.per_class.size()) {
        throw ParseError(0, "classes/classifiers length mismatch");
      }
      return m;
    }
    throw ParseError(0, "unknown model kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("invalid model JSON: ") + e.what());
  }
}

}  // namespace horosvm::model
