#include "horosvm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "horosvm/vec.hpp"

namespace horosvm::synth {

namespace {

constexpr std::size_t kGridSize = 4096;

// log of the unnormalized radial density exp(-r^2/(2s^2)) sinh(r)^(n-1).
double log_radial_density(double r, double sigma, std::size_t dim) {
  const double quad = -r * r / (2.0 * sigma * sigma);
  if (dim == 1) return quad;
  if (r <= 0.0) return -std::numeric_limits<double>::infinity();
  // log sinh(r) = r + log1p(-exp(-2r)) - log 2, stable for all r > 0.
  const double log_sinh = r + std::log1p(-std::exp(-2.0 * r)) - std::log(2.0);
  return quad + static_cast<double>(dim - 1) * log_sinh;
}

struct RadialTable {
  std::vector<double> r;
  std::vector<double> cdf;  // normalized, cdf.front() = 0, cdf.back() = 1

  double sample(double u) const {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.begin()) return r.front();
    if (it == cdf.end()) return r.back();
    const std::size_t j = static_cast<std::size_t>(it - cdf.begin()) - 1;
    const double seg = cdf[j + 1] - cdf[j];
    const double frac = seg > 0.0 ? (u - cdf[j]) / seg : 0.0;
    return r[j] + frac * (r[j + 1] - r[j]);
  }
};

std::vector<double> tabulate_cdf(std::span<const double> grid, double sigma,
                                 std::size_t dim) {
  std::vector<double> logp(grid.size());
  double max_logp = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    logp[i] = log_radial_density(grid[i], sigma, dim);
    max_logp = std::max(max_logp, logp[i]);
  }
  std::vector<double> cdf(grid.size(), 0.0);
  double acc = 0.0;
  double prev = std::exp(logp[0] - max_logp);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = std::exp(logp[i] - max_logp);
    acc += 0.5 * (prev + cur) * (grid[i] - grid[i - 1]);
    cdf[i] = acc;
    prev = cur;
  }
  for (double& c : cdf) c /= acc;
  return cdf;
}

RadialTable build_radial_table(std::size_t dim, double sigma) {
  // Provisional range generously covering the support: the quadratic term
  // dominates (n-1)r beyond (n-1) sigma^2.
  const double reach = static_cast<double>(dim - 1) * sigma * sigma + 13.0 * sigma;
  std::vector<double> grid(kGridSize);
  for (std::size_t i = 0; i < kGridSize; ++i) {
    grid[i] = reach * static_cast<double>(i) / static_cast<double>(kGridSize - 1);
  }
  auto cdf = tabulate_cdf(grid, sigma, dim);

  // Radial mean from the provisional table, then the final grid on
  // [0, mean + 10 sigma].
  double mean = 0.0;
  for (std::size_t i = 1; i < kGridSize; ++i) {
    mean += 0.5 * (grid[i] + grid[i - 1]) * (cdf[i] - cdf[i - 1]);
  }
  const double r_max = std::min(mean + 10.0 * sigma, reach);

  RadialTable table;
  table.r.resize(kGridSize);
  for (std::size_t i = 0; i < kGridSize; ++i) {
    table.r[i] = r_max * static_cast<double>(i) / static_cast<double>(kGridSize - 1);
  }
  table.cdf = tabulate_cdf(table.r, sigma, dim);
  return table;
}

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

}  // namespace

std::vector<geometry::PoincarePoint> sample_riemannian_normal(
    const RiemannianNormalParams& params, std::size_t count, std::uint64_t seed) {
  if (!(params.sigma > 0.0)) throw InvariantError("sigma must be positive");
  if (count == 0) throw InvariantError("count must be >= 1");
  const std::size_t dim = params.mean.dim();
  const RadialTable table = build_radial_table(dim, params.sigma);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double lam = geometry::conformal_factor(params.mean);

  std::vector<geometry::PoincarePoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = table.sample(unif(rng));
    auto dir = random_unit_vector(dim, rng);
    // Tangent vector with Riemannian length r.
    for (double& c : dir) c *= r / lam;
    out.push_back(geometry::exp_map({params.mean, std::move(dir)}));
  }
  return out;
}

data::LabeledDataset make_gmm_dataset(std::size_t n_classes, std::size_t per_class,
                                      double centroid_sigma, double cluster_sigma,
                                      std::size_t dim, std::uint64_t seed) {
  if (n_classes < 2) throw InvariantError("make_gmm_dataset requires >= 2 classes");
  if (per_class == 0) throw InvariantError("per_class must be >= 1");

  const auto centroids = sample_riemannian_normal(
      {geometry::PoincarePoint::origin(dim), centroid_sigma}, n_classes, seed);

  std::vector<double> coords;
  coords.reserve(n_classes * per_class * dim);
  std::vector<std::string> labels;
  labels.reserve(n_classes * per_class);
  for (std::size_t k = 0; k < n_classes; ++k) {
    const auto points =
        sample_riemannian_normal({centroids[k], cluster_sigma}, per_class, seed + 1 + k);
    const std::string label =
        n_classes == 2 ? (k == 0 ? "-1" : "+1") : std::to_string(k);
    for (const auto& p : points) {
      const auto c = p.coords();
      coords.insert(coords.end(), c.begin(), c.end());
      labels.push_back(label);
    }
  }
  return data::LabeledDataset(dim, std::move(coords), std::move(labels));
}

data::LabeledDataset inject_label_noise(const data::LabeledDataset& dataset,
                                        const NoiseSpec& spec, std::uint64_t seed) {
  if (!(spec.eta >= 0.0 && spec.eta <= 0.5)) {
    throw InvariantError("noise level eta must lie in [0, 0.5]");
  }
  std::vector<std::size_t> pos_idx, neg_idx;
  for (std::size_t i = 0; i < dataset.count(); ++i) {
    const int y = data::parse_binary_label(dataset.label(i));
    if (y == 1) {
      pos_idx.push_back(i);
    } else if (y == -1) {
      neg_idx.push_back(i);
    } else {
      throw InvariantError("label noise requires +-1 binary labels");
    }
  }

  const auto n_flips = static_cast<std::size_t>(
      std::llround(spec.eta * static_cast<double>(dataset.count())));
  auto labels = dataset.labels();
  if (n_flips == 0) return dataset.with_labels(std::move(labels));

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> flip;
  if (spec.balanced) {
    std::size_t n_pos = n_flips / 2;
    std::size_t n_neg = n_flips / 2;
    if (n_flips % 2 == 1) {
      // Odd total: the larger class absorbs the extra flip.
      (pos_idx.size() >= neg_idx.size() ? n_pos : n_neg) += 1;
    }
    if (pos_idx.size() < n_pos || neg_idx.size() < n_neg) {
      throw InsufficientClassMembers("class too small for balanced label flipping");
    }
    std::shuffle(pos_idx.begin(), pos_idx.end(), rng);
    std::shuffle(neg_idx.begin(), neg_idx.end(), rng);
    flip.assign(pos_idx.begin(), pos_idx.begin() + n_pos);
    flip.insert(flip.end(), neg_idx.begin(), neg_idx.begin() + n_neg);
  } else {
    std::vector<std::size_t> all(dataset.count());
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    flip.assign(all.begin(), all.begin() + n_flips);
  }
  for (std::size_t i : flip) {
    labels[i] = data::parse_binary_label(labels[i]) == 1 ? "-1" : "+1";
  }
  return dataset.with_labels(std::move(labels));
}

data::LabeledDataset make_cap_dataset(const geometry::IdealPoint& omega, double level,
                                      double gap, std::size_t per_class, std::size_t dim,
                                      std::uint64_t seed) {
  if (per_class == 0) throw InvariantError("per_class must be >= 1");
  if (!(gap > 0.0)) throw InvariantError("gap must be positive");
  if (omega.dim() != dim) throw DimensionMismatch("omega dimension does not match dim");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<double> coords;
  coords.reserve(2 * per_class * dim);
  std::vector<std::string> labels;
  labels.reserve(2 * per_class);

  // side < 0 asks for z.omega < -kSideMargin; side = 0 is unconstrained.
  // Every draw also avoids the tangency point at omega, where the horosphere
  // meets the ball boundary.
  constexpr double kSideMargin = 0.05;
  const auto emit = [&](double lambda, double side, const char* label) {
    const geometry::Horosphere h(1.0, omega, lambda);
    const auto sphere = geometry::horosphere_euclidean_form(h);
    const double center_proj = vec::dot(sphere.center, omega.direction());
    std::vector<double> u;
    for (int attempt = 0; attempt < 10000; ++attempt) {
      u = random_unit_vector(dim, rng);
      const double a = vec::dot(u, omega.direction());
      if (a > 0.9) continue;
      if (side < 0.0 && !(center_proj + sphere.radius * a < -kSideMargin)) continue;
      break;
    }
    for (std::size_t d = 0; d < dim; ++d) {
      coords.push_back(sphere.center[d] + sphere.radius * u[d]);
    }
    labels.emplace_back(label);
  };

  // Positives fill the cap toward omega. Negatives mimic the rest-of-tree
  // geometry: strongly negative Busemann levels, positioned on the far side
  // of the hemisphere boundary {z : omega^T z = 0} whenever the level allows
  // it. That keeps the intersection of the per-sample convexity hemispheres
  // nonempty (omega itself is a witness when level + gap > 0), which the
  // global-optimality experiments rely on.
  const double neg_hi = std::min(level - gap, -0.6);
  for (std::size_t i = 0; i < per_class; ++i) {
    emit(level + gap + unif(rng), 0.0, "+1");
  }
  for (std::size_t i = 0; i < per_class; ++i) {
    emit(neg_hi - unif(rng), -1.0, "-1");
  }
  return data::LabeledDataset(dim, std::move(coords), std::move(labels));
}

}  // namespace horosvm::synth
