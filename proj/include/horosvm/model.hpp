#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "horosvm/data.hpp"
#include "horosvm/geometry.hpp"
#include "horosvm/kernels.hpp"
#include "horosvm/manifold.hpp"
#include "horosvm/optim.hpp"

// The classifiers: horospherical decision rule, perceptron and soft-margin
// HoroSVM losses with analytic gradients, binary training over
// R+ x S^{n-1} x R+, one-vs-rest multiclass, and the geodesic-convexity probe.
namespace horosvm::model {

enum class LossKind { Perceptron, HoroSVM };

struct HoroClassifier {
  geometry::Horosphere boundary;
};

struct TrainConfig {
  double c = 10.0;  // soft-margin tradeoff (HoroSVM only)
  optim::OptimConfig optim;
  std::uint64_t seed = 0;
  std::size_t restarts = 5;
  // Majority:minority cap applied to training data before fitting; 0 disables.
  double downsample_ratio = 0.0;
};

struct OvRModel {
  std::vector<std::string> classes;        // sorted; index order breaks ties
  std::vector<HoroClassifier> per_class;   // parallel to classes
  std::size_t dim = 0;
};

// Binary model remembering the label tokens it was trained with.
struct BinaryModel {
  HoroClassifier clf;
  std::string pos_label = "+1";
  std::string neg_label = "-1";
  std::size_t dim = 0;
};

using Model = std::variant<BinaryModel, OvRModel>;

// Pre-sign score mu*<omega,x>_B - b; the predicted label is its sign, with
// exact zero resolving to +1.
double decision_value(const HoroClassifier& clf, const geometry::PoincarePoint& x);

// Batched loss + ambient gradient over a fixed dataset; reused across the
// optimizer's many evaluations. Samples at the exact origin are perturbed by
// 1e-12 (with a warning on stderr) so the convexity theorem's hypothesis holds.
class BatchObjective {
 public:
  BatchObjective(const data::LabeledDataset& dataset, LossKind kind, double c);

  double eval(const manifold::ProductPoint& p, manifold::AmbientGrad& grad);
  // The loss as a function of raw ambient coordinates (omega need not be
  // unit); this is the function the ambient gradient differentiates, so
  // finite-difference checks go through here.
  double eval_raw(double mu, std::span<const double> omega, double b,
                  manifold::AmbientGrad& grad);
  const kernels::Batch& batch() const { return batch_; }

  // Decomposition of the subdifferential at p: `base` is the gradient with
  // samples inside the kink band excluded (the inactive-at-kink convention the
  // plain gradient also uses); `kink` holds one activation gradient per sample
  // within `band` of its hinge threshold. Any convex combination
  // base + sum theta_i * kink_i with theta in [0,1]^m is a valid subgradient.
  struct SubdiffPieces {
    manifold::AmbientGrad base;
    std::vector<manifold::AmbientGrad> kink;
  };
  SubdiffPieces subdifferential(const manifold::ProductPoint& p, double band);

 private:
  kernels::Batch batch_;
  LossKind kind_;
  double c_;
  std::vector<double> lambda_, sq_dist_, coef_;
};

// Mean perceptron loss (1/|S|) sum max(0, -y (mu <omega,x>_B - b)) and its
// ambient gradient.
std::pair<double, manifold::AmbientGrad> perceptron_loss(const manifold::ProductPoint& p,
                                                         const data::LabeledDataset& dataset);

// Soft-margin loss mu^2/2 + c * sum max(0, 1 - y (mu <omega,x>_B - b)).
std::pair<double, manifold::AmbientGrad> horosvm_loss(const manifold::ProductPoint& p,
                                                      const data::LabeledDataset& dataset,
                                                      double c);

// min over samples of y * (mu <omega,x>_B - b) / mu; negative iff some sample
// is misclassified.
double margin(const geometry::Horosphere& h, const data::LabeledDataset& dataset);
double margin(const manifold::ProductPoint& p, const data::LabeledDataset& dataset);

struct RestartResult {
  manifold::ProductPoint point;
  optim::OptimizerReport report;
};

// All restart outcomes of a binary training run (labels must be +-1, both
// present). Restart r initializes omega uniformly on the sphere from seed
// cfg.seed + r, with mu = b = 1.
std::vector<RestartResult> train_binary_restarts(const data::LabeledDataset& dataset,
                                                 const TrainConfig& cfg, LossKind kind);

// Lowest-loss restart, packaged as a classifier.
std::pair<HoroClassifier, optim::OptimizerReport> train_binary(
    const data::LabeledDataset& dataset, const TrainConfig& cfg, LossKind kind);

// One HoroSVM per class against the rest. Per-class training seeds derive from
// cfg.seed by increment; downsampling (if enabled) applies per split.
OvRModel train_ovr(const data::LabeledDataset& dataset, const TrainConfig& cfg);

// Binary prediction: +1/-1 per point.
std::vector<int> predict(const HoroClassifier& clf, const data::LabeledDataset& points);

// OvR prediction: argmax over per-class signed distances (score / mu), ties
// broken by class order.
std::vector<std::string> predict(const OvRModel& model, const data::LabeledDataset& points);

// Label tokens for either model kind.
std::vector<std::string> predict_labels(const Model& model, const data::LabeledDataset& points);

// Trains a BinaryModel capturing the dataset's +-1 tokens.
BinaryModel train_binary_model(const data::LabeledDataset& dataset, const TrainConfig& cfg,
                               LossKind kind);

// Caps the majority class at ratio * minority count (binary +-1 labels);
// sample order is preserved.
data::LabeledDataset downsample_majority(const data::LabeledDataset& dataset, double ratio,
                                         std::uint64_t seed);

// True if omega separates every sample on the correct side of the hemisphere
// boundary {z : x^T z = 0}, i.e. omega lies in the intersection of the
// per-sample convexity hemispheres A_i.
bool in_common_hemisphere(std::span<const double> omega, const data::LabeledDataset& dataset);

struct ConvexityReport {
  std::size_t segments = 0;
  std::size_t convex_violations = 0;    // hemisphere A midpoint-convexity failures
  std::size_t concave_violations = 0;   // hemisphere B midpoint-concavity failures
  double tolerance = 1e-9;
};

// Numerically verifies geodesic convexity of the per-sample loss on hemisphere
// A = {nu : y x^T nu / |x| > 0} and concavity on B, along n_geodesics random
// sphere geodesic segments each (mu, b fixed at random positive values per
// segment). Throws DegeneratePoint when x is the ball center.
ConvexityReport convexity_probe(const geometry::PoincarePoint& x, int y,
                                std::size_t n_geodesics, std::uint64_t seed);

// Model file I/O (JSON; coordinates round-trip exactly).
void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path);

}  // namespace horosvm::model
