#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "horosvm/errors.hpp"
#include "horosvm/geometry.hpp"

// Dataset container, file I/O, train/test splitting, cross-validation folds,
// and classification metrics.
//
// File format: UTF-8 CSV with header line "dim=<n>" followed by rows
// "x_1,...,x_n,label". Coordinates are written with full precision; labels are
// arbitrary non-comma tokens.
namespace horosvm::data {

class LabeledDataset {
 public:
  // Validates |points| = |labels| >= 1 and that every point lies strictly
  // inside the ball (same bound as geometry::PoincarePoint).
  LabeledDataset(std::size_t dim, std::vector<double> coords_row_major,
                 std::vector<std::string> labels);

  std::size_t count() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }
  std::span<const double> coords() const { return coords_; }
  std::span<const double> point_view(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  geometry::PoincarePoint point(std::size_t i) const;
  const std::string& label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }

  // Distinct labels in sorted order.
  std::vector<std::string> classes() const;

  // Subset by row indices (order preserved).
  LabeledDataset subset(std::span<const std::size_t> indices) const;

  // Copy with labels replaced (same points).
  LabeledDataset with_labels(std::vector<std::string> labels) const;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  std::vector<std::string> labels_;
};

LabeledDataset read_dataset(const std::string& path);
void write_dataset(const std::string& path, const LabeledDataset& dataset);

struct SplitResult {
  LabeledDataset train;
  LabeledDataset test;
};

// Deterministic given seed; stratified keeps per-class proportions to +-1
// sample and requires every class to have >= 2 members.
SplitResult split(const LabeledDataset& dataset, double train_fraction, bool stratified,
                  std::uint64_t seed);

struct Fold {
  LabeledDataset train;
  LabeledDataset validation;
};

// k-fold partition; every sample lands in exactly one validation fold.
std::vector<Fold> kfold(const LabeledDataset& dataset, std::size_t k, bool stratified,
                        std::uint64_t seed);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  std::vector<std::string> classes;            // sorted union of truth and predictions
  std::vector<ClassMetrics> per_class;         // parallel to classes
  double macro_f1 = 0.0;                       // unweighted mean of per-class F1
  std::map<std::pair<std::string, std::string>, std::size_t> confusion;  // (truth, pred) -> count

  // key = value lines for machine consumption.
  std::string to_text() const;
};

MetricsReport evaluate(std::span<const std::string> predictions,
                       std::span<const std::string> truth);

// Parses a label token as +-1 ("1"/"+1" -> +1, "-1" -> -1); returns 0 if the
// token is neither.
int parse_binary_label(const std::string& token);

// True if the dataset's distinct labels all parse as +-1 and both signs occur.
bool is_binary_pm1(const LabeledDataset& dataset);

}  // namespace horosvm::data
