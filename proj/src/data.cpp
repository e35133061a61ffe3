#include "horosvm/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include "horosvm/vec.hpp"

namespace horosvm::data {

namespace {

void format_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

// Groups row indices by label, in sorted label order.
std::vector<std::vector<std::size_t>> indices_by_class(const LabeledDataset& d) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < d.count(); ++i) groups[d.label(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(groups.size());
  for (auto& [label, idx] : groups) out.push_back(std::move(idx));
  return out;
}

}  // namespace

LabeledDataset::LabeledDataset(std::size_t dim, std::vector<double> coords_row_major,
                               std::vector<std::string> labels)
    : dim_(dim), coords_(std::move(coords_row_major)), labels_(std::move(labels)) {
  if (dim_ == 0) throw InvariantError("dataset dimension must be >= 1");
  if (labels_.empty()) throw EmptyDataset("dataset has no samples");
  if (coords_.size() != labels_.size() * dim_) {
    throw DimensionMismatch("coordinate buffer does not match count*dim");
  }
  const double limit = (1.0 - geometry::kBoundaryEps) * (1.0 - geometry::kBoundaryEps);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const double sq = vec::sq_norm(point_view(i));
    if (!std::isfinite(sq) || !(sq < limit)) {
      throw InvariantError("sample " + std::to_string(i) +
                           " lies outside the open unit ball");
    }
  }
}

geometry::PoincarePoint LabeledDataset::point(std::size_t i) const {
  const auto v = point_view(i);
  return geometry::PoincarePoint(std::vector<double>(v.begin(), v.end()));
}

std::vector<std::string> LabeledDataset::classes() const {
  std::set<std::string> s(labels_.begin(), labels_.end());
  return {s.begin(), s.end()};
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> coords;
  coords.reserve(indices.size() * dim_);
  std::vector<std::string> labels;
  labels.reserve(indices.size());
  for (std::size_t i : indices) {
    const auto v = point_view(i);
    coords.insert(coords.end(), v.begin(), v.end());
    labels.push_back(labels_[i]);
  }
  return LabeledDataset(dim_, std::move(coords), std::move(labels));
}

LabeledDataset LabeledDataset::with_labels(std::vector<std::string> labels) const {
  if (labels.size() != labels_.size()) {
    throw LengthMismatch("replacement labels length differs from dataset size");
  }
  return LabeledDataset(dim_, coords_, std::move(labels));
}

LabeledDataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file: " + path);

  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("dim=", 0) != 0) throw ParseError(1, "header must be dim=<n>");
  std::size_t dim = 0;
  {
    const char* first = line.data() + 4;
    const char* last = line.data() + line.size();
    const auto res = std::from_chars(first, last, dim);
    if (res.ec != std::errc{} || res.ptr != last || dim == 0) {
      throw ParseError(1, "invalid dimension in header");
    }
  }

  std::vector<double> coords;
  std::vector<std::string> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != dim + 1) {
      throw ParseError(line_no, "expected " + std::to_string(dim + 1) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    for (std::size_t d = 0; d < dim; ++d) {
      double v = 0.0;
      const std::string& f = fields[d];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
        throw ParseError(line_no, "invalid number '" + f + "'");
      }
      coords.push_back(v);
    }
    if (fields[dim].empty()) throw ParseError(line_no, "empty label");
    labels.push_back(fields[dim]);
  }
  if (labels.empty()) throw ParseError(line_no + 1, "dataset has no rows");

  // Re-check norms here so the error names the offending row.
  const double limit = (1.0 - geometry::kBoundaryEps) * (1.0 - geometry::kBoundaryEps);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double sq =
        vec::sq_norm(std::span<const double>(coords.data() + i * dim, dim));
    if (!std::isfinite(sq) || !(sq < limit)) {
      throw InvariantError("row " + std::to_string(i) + " has norm >= 1");
    }
  }
  return LabeledDataset(dim, std::move(coords), std::move(labels));
}

void write_dataset(const std::string& path, const LabeledDataset& dataset) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  std::string buf;
  buf.reserve(64 * dataset.count());
  buf += "dim=" + std::to_string(dataset.dim()) + "\n";
  for (std::size_t i = 0; i < dataset.count(); ++i) {
    const auto v = dataset.point_view(i);
    for (double c : v) {
      format_double(buf, c);
      buf += ',';
    }
    buf += dataset.label(i);
    buf += '\n';
  }
  out << buf;
  if (!out) throw Error("failed writing dataset to " + path);
}

SplitResult split(const LabeledDataset& dataset, double train_fraction, bool stratified,
                  std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvariantError("train_fraction must lie in (0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;

  if (stratified) {
    for (auto& group : indices_by_class(dataset)) {
      if (group.size() < 2) {
        throw ClassTooSmall("stratified split needs >= 2 members per class");
      }
      std::shuffle(group.begin(), group.end(), rng);
      auto n_train = static_cast<std::size_t>(
          std::llround(train_fraction * static_cast<double>(group.size())));
      n_train = std::clamp<std::size_t>(n_train, 1, group.size() - 1);
      train_idx.insert(train_idx.end(), group.begin(), group.begin() + n_train);
      test_idx.insert(test_idx.end(), group.begin() + n_train, group.end());
    }
  } else {
    std::vector<std::size_t> all(dataset.count());
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(all.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, all.size() - 1);
    train_idx.assign(all.begin(), all.begin() + n_train);
    test_idx.assign(all.begin() + n_train, all.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return SplitResult{dataset.subset(train_idx), dataset.subset(test_idx)};
}

std::vector<Fold> kfold(const LabeledDataset& dataset, std::size_t k, bool stratified,
                        std::uint64_t seed) {
  if (k < 2) throw InvariantError("kfold requires k >= 2");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> fold_members(k);

  if (stratified) {
    for (auto& group : indices_by_class(dataset)) {
      if (group.size() < k) {
        throw ClassTooSmall("stratified k-fold needs >= k members per class");
      }
      std::shuffle(group.begin(), group.end(), rng);
      for (std::size_t i = 0; i < group.size(); ++i) {
        fold_members[i % k].push_back(group[i]);
      }
    }
  } else {
    if (dataset.count() < k) throw ClassTooSmall("k-fold needs >= k samples");
    std::vector<std::size_t> all(dataset.count());
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    for (std::size_t i = 0; i < all.size(); ++i) fold_members[i % k].push_back(all[i]);
  }

  std::vector<Fold> folds;
  folds.reserve(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> val = fold_members[f];
    std::vector<std::size_t> train;
    for (std::size_t g = 0; g < k; ++g) {
      if (g == f) continue;
      train.insert(train.end(), fold_members[g].begin(), fold_members[g].end());
    }
    std::sort(val.begin(), val.end());
    std::sort(train.begin(), train.end());
    folds.push_back(Fold{dataset.subset(train), dataset.subset(val)});
  }
  return folds;
}

MetricsReport evaluate(std::span<const std::string> predictions,
                       std::span<const std::string> truth) {
  if (predictions.size() != truth.size()) {
    throw LengthMismatch("predictions and truth have different lengths");
  }
  if (truth.empty()) throw EmptyDataset("nothing to evaluate");

  MetricsReport report;
  std::set<std::string> class_set(truth.begin(), truth.end());
  class_set.insert(predictions.begin(), predictions.end());
  report.classes.assign(class_set.begin(), class_set.end());

  for (std::size_t i = 0; i < truth.size(); ++i) {
    report.confusion[{truth[i], predictions[i]}]++;
  }

  double f1_sum = 0.0;
  for (const auto& cls : report.classes) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const bool t = truth[i] == cls;
      const bool p = predictions[i] == cls;
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
    ClassMetrics m;
    m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    report.per_class.push_back(m);
    f1_sum += m.f1;
  }
  report.macro_f1 = f1_sum / static_cast<double>(report.classes.size());
  return report;
}

std::string MetricsReport::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "classes = ";
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (i) out << ',';
    out << classes[i];
  }
  out << '\n';
  for (std::size_t i = 0; i < classes.size(); ++i) {
    out << "class." << classes[i] << ".precision = " << per_class[i].precision << '\n';
    out << "class." << classes[i] << ".recall = " << per_class[i].recall << '\n';
    out << "class." << classes[i] << ".f1 = " << per_class[i].f1 << '\n';
  }
  out << "macro_f1 = " << macro_f1 << '\n';
  for (const auto& [key, count] : confusion) {
    out << "confusion." << key.first << "." << key.second << " = " << count << '\n';
  }
  return out.str();
}

int parse_binary_label(const std::string& token) {
  if (token == "1" || token == "+1") return 1;
  if (token == "-1") return -1;
  return 0;
}

bool is_binary_pm1(const LabeledDataset& dataset) {
  bool pos = false, neg = false;
  for (const auto& l : dataset.labels()) {
    const int y = parse_binary_label(l);
    if (y == 1) {
      pos = true;
    } else if (y == -1) {
      neg = true;
    } else {
      return false;
    }
  }
  return pos && neg;
}

}  // namespace horosvm::data
