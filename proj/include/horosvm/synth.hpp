#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "horosvm/data.hpp"
#include "horosvm/geometry.hpp"

// Synthetic data generation on the Poincare ball: Riemannian normal sampling,
// Gaussian mixtures, horosphere-separable cap datasets, and label-noise
// injection. All generators are pure given the seed.
namespace horosvm::synth {

// Isotropic hyperbolic Gaussian: density proportional to
// exp(-d_B(mean, x)^2 / (2 sigma^2)). sigma is in hyperbolic-distance units.
struct RiemannianNormalParams {
  geometry::PoincarePoint mean;
  double sigma;
};

struct NoiseSpec {
  double eta = 0.0;        // fraction of training labels to flip, in [0, 0.5]
  bool balanced = true;    // equal counts flipped per class
};

// Draws the radius from p(r) ~ exp(-r^2/(2 sigma^2)) sinh(r)^(n-1) via a
// tabulated inverse CDF (4096-point grid, cut off at radial mean + 10 sigma),
// a uniform tangent direction at the mean, and maps through exp_map.
std::vector<geometry::PoincarePoint> sample_riemannian_normal(
    const RiemannianNormalParams& params, std::size_t count, std::uint64_t seed);

// Mixture dataset: n_classes centroids from a Riemannian normal at the origin
// with centroid_sigma, then per_class points per centroid with cluster_sigma.
// Two classes are labeled "-1"/"+1"; more classes are labeled "0", "1", ...
data::LabeledDataset make_gmm_dataset(std::size_t n_classes, std::size_t per_class,
                                      double centroid_sigma, double cluster_sigma,
                                      std::size_t dim, std::uint64_t seed);

// Flips exactly round(eta*|S|) labels of a +-1-labeled dataset; when balanced,
// the flips are split equally between the classes (odd remainder goes to the
// larger class). Points are untouched.
data::LabeledDataset inject_label_noise(const data::LabeledDataset& dataset,
                                        const NoiseSpec& spec, std::uint64_t seed);

// Horosphere-separable data: positives at Busemann levels >= level + gap,
// negatives at levels <= level - gap, so the horosphere at `level` separates
// them with margin >= gap by construction. Labels are "+1"/"-1".
data::LabeledDataset make_cap_dataset(const geometry::IdealPoint& omega, double level,
                                      double gap, std::size_t per_class, std::size_t dim,
                                      std::uint64_t seed);

}  // namespace horosvm::synth
