#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "horosvm/data.hpp"
#include "horosvm/geometry.hpp"
#include "horosvm/model.hpp"
#include "horosvm/synth.hpp"
#include "horosvm/vec.hpp"

// Exit codes: 0 success, 2 usage, 3 I/O or malformed data, 4 numerical failure.
namespace {

using namespace horosvm;

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << v;
  return os.str();
}

geometry::IdealPoint axis_omega(std::size_t dim) {
  std::vector<double> e(dim, 0.0);
  e[0] = 1.0;
  return geometry::IdealPoint(std::move(e));
}

// For binary models, aligns +-1 truth spellings ("1" vs "+1") with the
// model's stored token of the same parsed sign so string comparison is
// meaningful. Tokens that do not parse as +-1 pass through unchanged.
std::vector<std::string> canonical_truth(const model::Model& m,
                                         const data::LabeledDataset& ds) {
  std::vector<std::string> truth(ds.labels().begin(), ds.labels().end());
  if (const auto* bin = std::get_if<model::BinaryModel>(&m)) {
    const std::string* plus = nullptr;
    const std::string* minus = nullptr;
    for (const std::string* tok : {&bin->pos_label, &bin->neg_label}) {
      const int s = data::parse_binary_label(*tok);
      if (s == 1) plus = tok;
      if (s == -1) minus = tok;
    }
    for (auto& t : truth) {
      const int y = data::parse_binary_label(t);
      if (y == 1 && plus) t = *plus;
      if (y == -1 && minus) t = *minus;
    }
  }
  return truth;
}

// Swaps the +-1 labels of a dataset.
data::LabeledDataset swap_binary_labels(const data::LabeledDataset& ds) {
  auto labels = ds.labels();
  for (auto& l : labels) {
    const int y = data::parse_binary_label(l);
    if (y == 1) l = "-1";
    if (y == -1) l = "+1";
  }
  return ds.with_labels(std::move(labels));
}

double macro_f1(const model::Model& m, const data::LabeledDataset& ds) {
  const auto preds = model::predict_labels(m, ds);
  return data::evaluate(preds, canonical_truth(m, ds)).macro_f1;
}

// The Pi+ search space puts the positive class inside a horoball; for mixture
// data either cluster may be the horoball-shaped one, so fit both label
// orientations and keep the one that explains the training set better. The
// swapped model's tokens are exchanged back so its predictions stay in the
// original label semantics.
model::BinaryModel train_oriented(const data::LabeledDataset& train,
                                  const model::TrainConfig& cfg, model::LossKind kind) {
  auto fwd = model::train_binary_model(train, cfg, kind);
  auto rev = model::train_binary_model(swap_binary_labels(train), cfg, kind);
  std::swap(rev.pos_label, rev.neg_label);
  return macro_f1(fwd, train) >= macro_f1(rev, train) ? fwd : rev;
}

struct SynthOpts {
  std::string kind = "gmm";
  std::size_t classes = 2;
  std::size_t per_class = 200;
  double centroid_var = 1.5;
  double cluster_var = 1.0;
  std::size_t dim = 2;
  std::uint64_t seed = 0;
  double level = 1.0;
  double gap = 0.3;
  std::string out;
};

int run_synth(const SynthOpts& o) {
  data::LabeledDataset ds =
      o.kind == "cap"
          ? synth::make_cap_dataset(axis_omega(o.dim), o.level, o.gap, o.per_class, o.dim,
                                    o.seed)
          : synth::make_gmm_dataset(o.classes, o.per_class, o.centroid_var,
                                    o.cluster_var, o.dim, o.seed);
  data::write_dataset(o.out, ds);
  std::cout << "wrote " << ds.count() << " samples (dim " << ds.dim() << ") to " << o.out
            << "\n";
  return 0;
}

struct TrainOpts {
  std::string data;
  std::string loss = "horosvm";
  double c = 10.0;
  std::size_t restarts = 5;
  std::uint64_t seed = 0;
  double downsample_ratio = 0.0;
  std::size_t max_iters = 2000;
  std::string model_out;
};

model::TrainConfig to_train_config(double c, std::size_t restarts, std::uint64_t seed,
                                   double downsample_ratio, std::size_t max_iters) {
  model::TrainConfig cfg;
  cfg.c = c;
  cfg.restarts = restarts;
  cfg.seed = seed;
  cfg.downsample_ratio = downsample_ratio;
  cfg.optim.max_iters = max_iters;
  return cfg;
}

int run_train(const TrainOpts& o) {
  const auto ds = data::read_dataset(o.data);
  const auto cfg =
      to_train_config(o.c, o.restarts, o.seed, o.downsample_ratio, o.max_iters);
  const auto kind =
      o.loss == "perceptron" ? model::LossKind::Perceptron : model::LossKind::HoroSVM;

  if (data::is_binary_pm1(ds)) {
    auto train_data = ds;
    if (cfg.downsample_ratio > 0.0) {
      train_data = model::downsample_majority(ds, cfg.downsample_ratio, cfg.seed);
    }
    auto [clf, report] = model::train_binary(train_data, cfg, kind);
    model::BinaryModel bin{clf, "+1", "-1", ds.dim()};
    for (const auto& l : ds.labels()) {
      (data::parse_binary_label(l) > 0 ? bin.pos_label : bin.neg_label) = l;
    }
    model::save_model(o.model_out, bin);
    std::cout << "loss = " << report.final_loss << "\n"
              << "margin = " << model::margin(clf.boundary, train_data) << "\n"
              << "iterations = " << report.iters_used << "\n"
              << "converged = " << (report.converged ? "yes" : "no") << "\n";
    return 0;
  }

  if (kind == model::LossKind::Perceptron) {
    std::cerr << "error: --loss perceptron requires binary +-1 labels\n";
    return 2;
  }
  const auto ovr = model::train_ovr(ds, cfg);
  model::save_model(o.model_out, ovr);
  for (std::size_t k = 0; k < ovr.classes.size(); ++k) {
    const auto& h = ovr.per_class[k].boundary;
    std::cout << "class " << ovr.classes[k] << ": mu = " << h.mu << ", b = " << h.b
              << ", level = " << h.level() << "\n";
  }
  std::cout << "classes = " << ovr.classes.size() << "\n";
  return 0;
}

int run_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path) {
  const auto m = model::load_model(model_path);
  const auto ds = data::read_dataset(data_path);
  const auto labels = model::predict_labels(m, ds);
  std::ostringstream body;
  for (const auto& l : labels) body << l << '\n';
  if (out_path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw Error("cannot open output file: " + out_path);
    out << body.str();
  }
  return 0;
}

int run_eval(const std::string& model_path, const std::string& data_path) {
  const auto m = model::load_model(model_path);
  const auto ds = data::read_dataset(data_path);
  const auto predictions = model::predict_labels(m, ds);
  const auto truth = canonical_truth(m, ds);
  std::cout << data::evaluate(predictions, truth).to_text();
  return 0;
}

struct CvOpts {
  std::string data;
  std::vector<double> c_grid = {1.0, 5.0, 10.0};
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  std::size_t restarts = 5;
  std::size_t max_iters = 2000;
};

int run_cv(const CvOpts& o) {
  const auto ds = data::read_dataset(o.data);
  auto grid = o.c_grid;
  std::sort(grid.begin(), grid.end());
  const auto folds = data::kfold(ds, o.folds, /*stratified=*/true, o.seed);
  const bool binary = data::is_binary_pm1(ds);

  double best_mean = -1.0;
  double best_c = grid.front();
  for (double c : grid) {
    std::vector<double> scores;
    scores.reserve(folds.size());
    for (const auto& fold : folds) {
      const auto cfg = to_train_config(c, o.restarts, o.seed, 0.0, o.max_iters);
      model::Model m =
          binary
              ? model::Model(model::train_binary_model(fold.train, cfg,
                                                       model::LossKind::HoroSVM))
              : model::Model(model::train_ovr(fold.train, cfg));
      const auto preds = model::predict_labels(m, fold.validation);
      const auto truth = canonical_truth(m, fold.validation);
      scores.push_back(data::evaluate(preds, truth).macro_f1);
    }
    const auto ms = mean_std(scores);
    std::cout << "C=" << c << " macro_f1_mean=" << fmt(ms.mean)
              << " macro_f1_std=" << fmt(ms.std) << "\n";
    if (ms.mean > best_mean) {
      best_mean = ms.mean;
      best_c = c;
    }
  }
  std::cout << "selected_c=" << best_c << "\n";
  return 0;
}

struct NoiseBenchOpts {
  std::size_t datasets = 100;
  std::vector<double> etas;
  std::uint64_t seed = 0;
  std::string out;
  double c = 1.0;
  std::size_t per_class = 200;
  double centroid_var = 1.5;
  double cluster_var = 1.0;
  std::size_t dim = 2;
  std::size_t restarts = 5;
  std::size_t max_iters = 2000;
};

int run_noise_bench(const NoiseBenchOpts& o) {
  std::vector<double> etas = o.etas;
  if (etas.empty()) {
    for (int i = 0; i <= 10; ++i) etas.push_back(0.05 * i);
  }
  for (double eta : etas) {
    if (!(eta >= 0.0 && eta <= 0.5)) {
      std::cerr << "error: eta values must lie in [0, 0.5]\n";
      return 2;
    }
  }

  std::vector<std::vector<double>> train_f1(etas.size());
  std::vector<std::vector<double>> test_f1(etas.size());

  for (std::size_t d = 0; d < o.datasets; ++d) {
    const std::uint64_t base = o.seed + 101 * (d + 1);
    const auto full = synth::make_gmm_dataset(2, o.per_class, o.centroid_var,
                                              o.cluster_var, o.dim, base);
    const auto parts = data::split(full, 0.5, /*stratified=*/true, base + 1);
    for (std::size_t j = 0; j < etas.size(); ++j) {
      const auto noisy =
          synth::inject_label_noise(parts.train, {etas[j], true}, base + 2 + j);
      const auto cfg = to_train_config(o.c, o.restarts, base + 50 + j, 0.0, o.max_iters);
      const model::Model m = train_oriented(noisy, cfg, model::LossKind::HoroSVM);
      train_f1[j].push_back(macro_f1(m, noisy));
      test_f1[j].push_back(macro_f1(m, parts.test));
    }
  }

  std::ostringstream csv;
  csv << "eta,train_f1_mean,test_f1_mean,std\n";
  for (std::size_t j = 0; j < etas.size(); ++j) {
    const auto tr = mean_std(train_f1[j]);
    const auto te = mean_std(test_f1[j]);
    csv << fmt(etas[j]) << ',' << fmt(tr.mean) << ',' << fmt(te.mean) << ','
        << fmt(te.std) << "\n";
  }
  std::ofstream out(o.out);
  if (!out) throw Error("cannot open output file: " + o.out);
  out << csv.str();
  std::cout << "wrote " << etas.size() << " rows to " << o.out << "\n";
  return 0;
}

struct ProbeOpts {
  std::size_t dim = 2;
  std::uint64_t seed = 0;
  std::size_t segments = 1000;
  std::string data;
  std::size_t index = 0;
};

int run_probe(const ProbeOpts& o) {
  std::vector<double> coords;
  int y = 1;
  if (!o.data.empty()) {
    const auto ds = data::read_dataset(o.data);
    if (o.index >= ds.count()) {
      std::cerr << "error: --index out of range (dataset has " << ds.count()
                << " samples)\n";
      return 2;
    }
    const auto v = ds.point_view(o.index);
    coords.assign(v.begin(), v.end());
    y = data::parse_binary_label(ds.label(o.index));
    if (y == 0) {
      std::cerr << "error: sample label must be +-1\n";
      return 2;
    }
  } else {
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.05, 0.9);
    coords.resize(o.dim);
    double n = 0.0;
    do {
      for (double& c : coords) c = normal(rng);
      n = vec::norm(coords);
    } while (n <= 1e-12);
    const double r = unif(rng);
    for (double& c : coords) c *= r / n;
    y = (rng() & 1) ? 1 : -1;
  }
  const auto report =
      model::convexity_probe(geometry::PoincarePoint(coords), y, o.segments, o.seed + 1);
  std::cout << "dim = " << coords.size() << "\n"
            << "label = " << y << "\n"
            << "segments_per_hemisphere = " << report.segments << "\n"
            << "convex_violations_A = " << report.convex_violations << "\n"
            << "concave_violations_B = " << report.concave_violations << "\n"
            << "tolerance = " << report.tolerance << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HoroSVM: hyperbolic large-margin classifiers with horospherical decision boundaries"};
  app.require_subcommand(1);

  SynthOpts synth_opts;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth_cmd->add_option("--kind", synth_opts.kind, "Dataset family")
      ->check(CLI::IsMember({"gmm", "cap"}))
      ->capture_default_str();
  synth_cmd->add_option("--classes", synth_opts.classes, "Number of classes (gmm)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000}))
      ->capture_default_str();
  synth_cmd->add_option("--per-class", synth_opts.per_class, "Samples per class")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--centroid-var", synth_opts.centroid_var, "Centroid spread sigma (gmm)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--cluster-var", synth_opts.cluster_var, "Cluster spread sigma (gmm)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--dim", synth_opts.dim, "Ball dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth_opts.seed, "RNG seed")->capture_default_str();
  synth_cmd->add_option("--level", synth_opts.level, "Separating Busemann level (cap)")
      ->capture_default_str();
  synth_cmd->add_option("--gap", synth_opts.gap, "Separation margin (cap)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--out", synth_opts.out, "Output dataset file")->required();

  TrainOpts train_opts;
  auto* train_cmd = app.add_subcommand("train", "Train a classifier");
  train_cmd->add_option("--data", train_opts.data, "Training dataset")->required();
  train_cmd->add_option("--loss", train_opts.loss, "Loss kind")
      ->check(CLI::IsMember({"perceptron", "horosvm"}))
      ->capture_default_str();
  train_cmd->add_option("--c", train_opts.c, "Soft-margin tradeoff C")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--restarts", train_opts.restarts, "Random restarts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--seed", train_opts.seed, "RNG seed")->capture_default_str();
  train_cmd
      ->add_option("--downsample-ratio", train_opts.downsample_ratio,
                   "Majority:minority cap (0 disables)")
      ->capture_default_str();
  train_cmd->add_option("--max-iters", train_opts.max_iters, "Optimizer iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--model-out", train_opts.model_out, "Model output file")
      ->required();

  std::string predict_model, predict_data, predict_out;
  auto* predict_cmd = app.add_subcommand("predict", "Predict labels for a dataset");
  predict_cmd->add_option("--model", predict_model, "Model file")->required();
  predict_cmd->add_option("--data", predict_data, "Dataset file")->required();
  predict_cmd->add_option("--out", predict_out, "Output file (default stdout)");

  std::string eval_model, eval_data;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on labeled data");
  eval_cmd->add_option("--model", eval_model, "Model file")->required();
  eval_cmd->add_option("--data", eval_data, "Labeled dataset file")->required();

  CvOpts cv_opts;
  auto* cv_cmd = app.add_subcommand("cv", "Cross-validate the soft-margin tradeoff C");
  cv_cmd->add_option("--data", cv_opts.data, "Labeled dataset file")->required();
  cv_cmd->add_option("--c-grid", cv_opts.c_grid, "Candidate C values")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cv_cmd->add_option("--folds", cv_opts.folds, "Number of folds")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000}))
      ->capture_default_str();
  cv_cmd->add_option("--seed", cv_opts.seed, "RNG seed")->capture_default_str();
  cv_cmd->add_option("--restarts", cv_opts.restarts, "Random restarts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cv_cmd->add_option("--max-iters", cv_opts.max_iters, "Optimizer iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  NoiseBenchOpts nb_opts;
  auto* nb_cmd = app.add_subcommand(
      "noise-bench", "Label-noise robustness sweep on regenerated mixture datasets");
  nb_cmd->add_option("--datasets", nb_opts.datasets, "Number of datasets")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  nb_cmd->add_option("--etas", nb_opts.etas, "Noise levels (default 0,0.05,...,0.5)")
      ->delimiter(',');
  nb_cmd->add_option("--seed", nb_opts.seed, "RNG seed")->capture_default_str();
  nb_cmd->add_option("--out", nb_opts.out, "Output CSV file")->required();
  nb_cmd->add_option("--c", nb_opts.c, "Soft-margin tradeoff C")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  nb_cmd->add_option("--per-class", nb_opts.per_class, "Samples per class")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  nb_cmd->add_option("--centroid-var", nb_opts.centroid_var, "Centroid spread sigma")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  nb_cmd->add_option("--cluster-var", nb_opts.cluster_var, "Cluster spread sigma")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  nb_cmd->add_option("--dim", nb_opts.dim, "Ball dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  nb_cmd->add_option("--restarts", nb_opts.restarts, "Random restarts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  nb_cmd->add_option("--max-iters", nb_opts.max_iters, "Optimizer iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  ProbeOpts probe_opts;
  auto* probe_cmd = app.add_subcommand(
      "probe-convexity", "Verify loss convexity/concavity along sphere geodesics");
  probe_cmd->add_option("--dim", probe_opts.dim, "Ball dimension (random sample)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  probe_cmd->add_option("--seed", probe_opts.seed, "RNG seed")->capture_default_str();
  probe_cmd->add_option("--segments", probe_opts.segments, "Geodesic segments per hemisphere")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  probe_cmd->add_option("--data", probe_opts.data, "Take the sample from this dataset");
  probe_cmd->add_option("--index", probe_opts.index, "Sample index within --data")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth_cmd->parsed()) return run_synth(synth_opts);
    if (train_cmd->parsed()) return run_train(train_opts);
    if (predict_cmd->parsed()) return run_predict(predict_model, predict_data, predict_out);
    if (eval_cmd->parsed()) return run_eval(eval_model, eval_data);
    if (cv_cmd->parsed()) return run_cv(cv_opts);
    if (nb_cmd->parsed()) return run_noise_bench(nb_opts);
    if (probe_cmd->parsed()) return run_probe(probe_opts);
  } catch (const NonFiniteObjective& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
