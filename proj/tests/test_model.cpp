#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include <doctest.h>

#include "horosvm/model.hpp"
#include "horosvm/synth.hpp"
#include "horosvm/vec.hpp"
#include "support/oracles.hpp"

using namespace horosvm;
using namespace horosvm::model;
using horosvm::testing::random_ball_point;
using horosvm::testing::random_unit;

TEST_SUITE_BEGIN("model");

namespace {

geometry::IdealPoint axis(std::size_t dim) {
  std::vector<double> e(dim, 0.0);
  e[0] = 1.0;
  return geometry::IdealPoint(std::move(e));
}

data::LabeledDataset two_clusters(std::size_t per_class, std::size_t dim, double level,
                                  double sigma, std::uint64_t seed) {
  const auto w = axis(dim);
  const auto pos_mean = geometry::geodesic_ray(w, level);
  std::vector<double> neg_dir(dim, 0.0);
  neg_dir[0] = -1.0;
  const auto neg_mean =
      geometry::geodesic_ray(geometry::IdealPoint(neg_dir), level);
  const auto pos = synth::sample_riemannian_normal({pos_mean, sigma}, per_class, seed);
  const auto neg = synth::sample_riemannian_normal({neg_mean, sigma}, per_class, seed + 1);
  std::vector<double> coords;
  std::vector<std::string> labels;
  for (const auto& p : pos) {
    coords.insert(coords.end(), p.coords().begin(), p.coords().end());
    labels.push_back("+1");
  }
  for (const auto& p : neg) {
    coords.insert(coords.end(), p.coords().begin(), p.coords().end());
    labels.push_back("-1");
  }
  return data::LabeledDataset(dim, std::move(coords), std::move(labels));
}

double hinge_sum(const manifold::ProductPoint& p, const data::LabeledDataset& ds) {
  double sum = 0.0;
  const geometry::IdealPoint w(
      std::vector<double>(p.omega.u().begin(), p.omega.u().end()));
  for (std::size_t i = 0; i < ds.count(); ++i) {
    const double y = data::parse_binary_label(ds.label(i));
    const double s =
        y * (p.mu.value() * geometry::poincare_inner(w, ds.point(i)) - p.b.value());
    sum += std::max(0.0, 1.0 - s);
  }
  return sum;
}

manifold::ProductPoint from_classifier(const HoroClassifier& clf) {
  return manifold::ProductPoint{
      manifold::PositiveScalar(clf.boundary.mu),
      manifold::SpherePoint(std::vector<double>(clf.boundary.omega.direction().begin(),
                                                clf.boundary.omega.direction().end())),
      manifold::PositiveScalar(clf.boundary.b)};
}

}  // namespace

TEST_CASE("decision value") {
  std::mt19937_64 rng(3);
  const auto w = axis(3);

  SUBCASE("zero on the boundary, minus b at the origin") {
    HoroClassifier clf{geometry::Horosphere(2.0, w, 1.6)};
    const auto on_boundary = geometry::geodesic_ray(w, 0.8);  // level b/mu = 0.8
    CHECK(decision_value(clf, on_boundary) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(decision_value(clf, geometry::PoincarePoint::origin(3)) ==
          doctest::Approx(-1.6).epsilon(1e-14));
  }

  SUBCASE("sign is invariant under joint (mu, b) scaling") {
    for (int trial = 0; trial < 50; ++trial) {
      const auto x = random_ball_point(3, rng);
      const double lambda = geometry::poincare_inner(w, x);
      for (double c : {1e-3, 1.0, 1e3}) {
        const double base = decision_value(HoroClassifier{{1.2, w, 0.9}}, x);
        const double scaled =
            decision_value(HoroClassifier{{c * 1.2, w, c * 0.9}}, x);
        CHECK((base >= 0.0) == (scaled >= 0.0));
        (void)lambda;
      }
    }
  }
}

TEST_CASE("perceptron loss values") {
  const auto w = axis(2);
  // Two correctly classified points with positive slack for boundary level 1.
  std::vector<double> coords;
  auto add = [&](double level) {
    const auto p = geometry::geodesic_ray(w, 0.0 == level ? 0.0 : std::abs(level));
    // place positives at level 2, negative at level 0 via the ray and sign
    coords.push_back(std::tanh(level / 2.0));
    coords.push_back(0.0);
  };
  add(2.0);
  add(0.2);
  data::LabeledDataset ds(2, coords, {"+1", "-1"});

  manifold::ProductPoint p{manifold::PositiveScalar(1.0),
                           manifold::SpherePoint({1.0, 0.0}),
                           manifold::PositiveScalar(1.0)};
  auto [loss, grad] = perceptron_loss(p, ds);
  CHECK(loss == 0.0);
  CHECK(grad.mu == 0.0);
  CHECK(grad.b == 0.0);
  CHECK(vec::norm(grad.omega) == 0.0);

  // Single misclassified positive at level 0.5 with boundary level 1:
  // loss = (b - mu*lambda)/1.
  data::LabeledDataset one(2, {std::tanh(0.25), 0.0}, {"+1"});
  auto [loss1, grad1] = perceptron_loss(p, one);
  CHECK(loss1 == doctest::Approx(1.0 - 0.5).epsilon(1e-12));
  CHECK(grad1.b == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("horosvm loss values") {
  const auto ds = two_clusters(20, 3, 2.5, 0.4, 5);

  SUBCASE("hinge-inactive loss is exactly mu^2/2") {
    // A boundary at level 1.25 separates levels >= 2ish from <= -2ish with
    // slack; mu large enough makes every slack exceed 1.
    manifold::ProductPoint p{manifold::PositiveScalar(4.0),
                             manifold::SpherePoint({1.0, 0.0, 0.0}),
                             manifold::PositiveScalar(5.0)};
    auto [loss, grad] = horosvm_loss(p, ds, 10.0);
    CHECK(loss == 0.5 * 16.0);
    CHECK(grad.mu == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(grad.b == 0.0);
  }

  SUBCASE("c to zero drives the infimum to zero") {
    TrainConfig cfg;
    cfg.c = 1e-9;
    cfg.seed = 3;
    cfg.restarts = 1;
    const auto [clf, report] = train_binary(ds, cfg, LossKind::HoroSVM);
    CHECK(clf.boundary.mu < 1e-2);
    CHECK(report.final_loss < 1e-5);
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> scale(0.4, 2.5);
  const double h = 1e-6;

  for (std::size_t dim : {2u, 5u, 10u}) {
    const auto ds = two_clusters(15, dim, 2.0, 0.8, 100 + dim);
    for (auto kind : {LossKind::Perceptron, LossKind::HoroSVM}) {
      BatchObjective obj(ds, kind, 3.0);
      const double threshold = kind == LossKind::HoroSVM ? 1.0 : 0.0;
      int done = 0;
      while (done < 12) {
        const double mu = scale(rng);
        const double b = scale(rng);
        const auto omega = random_unit(dim, rng);

        // Skip parameter points within 1e-4 of any hinge kink.
        bool near_kink = false;
        for (std::size_t i = 0; i < ds.count(); ++i) {
          const double y = data::parse_binary_label(ds.label(i));
          const double lam = geometry::poincare_inner(
              geometry::IdealPoint(omega), ds.point(i));
          if (std::abs(threshold - y * (mu * lam - b)) < 1e-4) {
            near_kink = true;
            break;
          }
        }
        if (near_kink) continue;
        ++done;

        manifold::AmbientGrad grad;
        obj.eval_raw(mu, omega, b, grad);

        manifold::AmbientGrad scratch;
        const auto check = [&](double analytic, double fd) {
          CHECK(std::abs(analytic - fd) <=
                1e-5 * std::max({std::abs(analytic), std::abs(fd), 1e-3}));
        };
        check(grad.mu, (obj.eval_raw(mu + h, omega, b, scratch) -
                        obj.eval_raw(mu - h, omega, b, scratch)) /
                           (2.0 * h));
        check(grad.b, (obj.eval_raw(mu, omega, b + h, scratch) -
                       obj.eval_raw(mu, omega, b - h, scratch)) /
                          (2.0 * h));
        for (std::size_t d = 0; d < dim; ++d) {
          auto hi = omega;
          auto lo = omega;
          hi[d] += h;
          lo[d] -= h;
          check(grad.omega[d], (obj.eval_raw(mu, hi, b, scratch) -
                                obj.eval_raw(mu, lo, b, scratch)) /
                                   (2.0 * h));
        }
      }
    }
  }
}

TEST_CASE("margin") {
  const auto w = axis(2);

  SUBCASE("zero for a sample on the horosphere") {
    data::LabeledDataset one(2, {std::tanh(0.5), 0.0}, {"+1"});
    CHECK(margin(geometry::Horosphere(1.0, w, 1.0), one) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("invariant under the renormalization (mu, b) -> (mu/g, b/g)") {
    const auto ds = two_clusters(10, 2, 2.0, 0.5, 9);
    const geometry::Horosphere h(1.7, w, 1.3);
    const double base = margin(h, ds);
    for (double g : {0.2, 1.0, 37.0}) {
      CHECK(std::abs(margin(geometry::Horosphere(1.7 / g, w, 1.3 / g), ds) - base) <=
            1e-12 * std::max(1.0, std::abs(base)));
    }
  }

  SUBCASE("equals the signed point-to-horosphere distance minimum") {
    std::mt19937_64 rng(11);
    const auto ds = two_clusters(15, 3, 2.0, 0.7, 13);
    const geometry::IdealPoint v(random_unit(3, rng));
    const geometry::Horosphere h(0.8, v, 0.9);
    double expect = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ds.count(); ++i) {
      const double y = data::parse_binary_label(ds.label(i));
      const double dist = geometry::point_to_horosphere_distance(ds.point(i), h);
      const double side =
          y * (0.8 * geometry::poincare_inner(v, ds.point(i)) - 0.9) >= 0.0 ? 1.0 : -1.0;
      expect = std::min(expect, side * dist);
    }
    CHECK(margin(h, ds) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("binary training") {
  SUBCASE("errors") {
    data::LabeledDataset single(2, {0.1, 0.0, 0.2, 0.0}, {"+1", "+1"});
    CHECK_THROWS_AS(train_binary(single, TrainConfig{}, LossKind::HoroSVM),
                    SingleClassDataset);
    data::LabeledDataset strange(2, {0.1, 0.0}, {"cat"});
    CHECK_THROWS_AS(train_binary(strange, TrainConfig{}, LossKind::HoroSVM),
                    InvariantError);
  }

  SUBCASE("subtree-style cap data trains to F1 one with inactive hinges") {
    const auto ds = synth::make_cap_dataset(axis(2), 1.5, 0.4, 60, 2, 17);
    TrainConfig cfg;
    cfg.c = 10.0;
    cfg.seed = 5;
    cfg.restarts = 3;
    const auto [clf, report] = train_binary(ds, cfg, LossKind::HoroSVM);
    const auto preds = predict(clf, ds);
    for (std::size_t i = 0; i < ds.count(); ++i) {
      CHECK(preds[i] == data::parse_binary_label(ds.label(i)));
    }
    CHECK(hinge_sum(from_classifier(clf), ds) <= 1e-5);
    CHECK(report.final_loss <= 0.5 * clf.boundary.mu * clf.boundary.mu + 1e-4);
  }

  SUBCASE("two samples on a ray have a closed-form max-margin solution") {
    const auto w = axis(2);
    data::LabeledDataset pair(
        2, {std::tanh(1.0), 0.0, std::tanh(0.5), 0.0}, {"+1", "-1"});
    TrainConfig cfg;
    cfg.c = 50.0;
    cfg.seed = 2;
    cfg.restarts = 5;
    cfg.optim.max_iters = 5000;
    const auto [clf, report] = train_binary(pair, cfg, LossKind::HoroSVM);
    // Levels 2 and 1: mu* = 2/(2-1), b* = mu*(2+1)/2, margin half the gap.
    CHECK(margin(clf.boundary, pair) == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(clf.boundary.mu == doctest::Approx(2.0).epsilon(2e-3));
    CHECK(report.final_loss == doctest::Approx(2.0).epsilon(2e-3));

    const auto [pclf, preport] = train_binary(pair, cfg, LossKind::Perceptron);
    CHECK(preport.final_loss == 0.0);
    const double pmargin = margin(pclf.boundary, pair);
    CHECK(pmargin > 0.0);
    CHECK(pmargin <= 0.5 + 1e-9);
  }

  SUBCASE("separable mixture data reaches F1 0.99 across seeds") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto ds = two_clusters(100, 2, 3.0, 1.0, 1000 + seed);
      TrainConfig cfg;
      cfg.c = 10.0;
      cfg.seed = seed;
      cfg.restarts = 5;
      const auto [clf, report] = train_binary(ds, cfg, LossKind::HoroSVM);
      const auto preds = predict(clf, ds);
      std::vector<std::string> pred_tokens(preds.size());
      for (std::size_t i = 0; i < preds.size(); ++i) {
        pred_tokens[i] = preds[i] > 0 ? "+1" : "-1";
      }
      const auto metrics = data::evaluate(pred_tokens, ds.labels());
      CHECK(metrics.macro_f1 >= 0.99);
    }
  }

  SUBCASE("exact-origin samples are perturbed, not fatal") {
    data::LabeledDataset with_origin(
        2, {0.0, 0.0, std::tanh(1.0), 0.0, -0.4, 0.1}, {"-1", "+1", "-1"});
    TrainConfig cfg;
    cfg.seed = 1;
    cfg.restarts = 2;
    CHECK_NOTHROW(train_binary(with_origin, cfg, LossKind::HoroSVM));
  }
}

TEST_CASE("restart agreement on separable data (global optimality)") {
  const auto ds = synth::make_cap_dataset(axis(3), 1.0, 0.3, 60, 3, 23);
  CHECK(in_common_hemisphere(axis(3).direction(), ds));
  TrainConfig cfg;
  cfg.c = 10.0;
  cfg.seed = 11;
  cfg.restarts = 5;
  cfg.optim.max_iters = 20000;
  const auto results = train_binary_restarts(ds, cfg, LossKind::HoroSVM);
  std::vector<double> in_losses;
  for (const auto& r : results) {
    if (in_common_hemisphere(r.point.omega.u(), ds)) {
      in_losses.push_back(r.report.final_loss);
    }
  }
  REQUIRE(in_losses.size() >= 2);
  const auto [lo, hi] = std::minmax_element(in_losses.begin(), in_losses.end());
  CHECK(*hi - *lo <= 1e-4);
}

TEST_CASE("one-vs-rest") {
  SUBCASE("three separated clusters reach macro-F1 0.95") {
    // Clusters toward three fixed directions at level 2.5.
    std::vector<std::vector<double>> dirs = {
        {1.0, 0.0}, {-0.5, std::sqrt(3.0) / 2.0}, {-0.5, -std::sqrt(3.0) / 2.0}};
    std::vector<double> coords;
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const auto mean = geometry::geodesic_ray(geometry::IdealPoint(dirs[k]), 2.5);
      const auto pts = synth::sample_riemannian_normal({mean, 0.7}, 60, 40 + k);
      for (const auto& p : pts) {
        coords.insert(coords.end(), p.coords().begin(), p.coords().end());
        labels.push_back(std::to_string(k));
      }
    }
    const data::LabeledDataset ds(2, coords, labels);
    TrainConfig cfg;
    cfg.c = 10.0;
    cfg.seed = 4;
    cfg.restarts = 3;
    const auto model = train_ovr(ds, cfg);
    REQUIRE(model.classes.size() == 3);
    const auto preds = predict(model, ds);
    CHECK(data::evaluate(preds, ds.labels()).macro_f1 >= 0.95);
  }

  SUBCASE("two-class OvR mostly agrees with the binary classifier") {
    const auto ds = two_clusters(80, 2, 2.5, 0.8, 60);
    TrainConfig cfg;
    cfg.c = 10.0;
    cfg.seed = 8;
    cfg.restarts = 3;
    const auto ovr = train_ovr(ds, cfg);
    const auto [bin, report] = train_binary(ds, cfg, LossKind::HoroSVM);
    const auto ovr_preds = predict(ovr, ds);
    const auto bin_preds = predict(bin, ds);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < ds.count(); ++i) {
      const std::string bin_token = bin_preds[i] > 0 ? "+1" : "-1";
      agree += ovr_preds[i] == bin_token;
    }
    CHECK(static_cast<double>(agree) >= 0.95 * static_cast<double>(ds.count()));
  }

  SUBCASE("single-class dataset is rejected") {
    data::LabeledDataset single(2, {0.1, 0.0, 0.2, 0.0}, {"a", "a"});
    CHECK_THROWS_AS(train_ovr(single, TrainConfig{}), SingleClassDataset);
  }
}

TEST_CASE("prediction") {
  const auto w = axis(2);
  HoroClassifier clf{geometry::Horosphere(1.0, w, 1.0)};

  SUBCASE("deep inside the horoball is positive") {
    data::LabeledDataset pts(2, {std::tanh(1.5), 0.0, -0.5, 0.0}, {"?", "?"});
    const auto preds = predict(clf, pts);
    CHECK(preds[0] == 1);
    CHECK(preds[1] == -1);
  }

  SUBCASE("dimension mismatch") {
    data::LabeledDataset pts(3, {0.1, 0.0, 0.0}, {"?"});
    CHECK_THROWS_AS(predict(clf, pts), DimensionMismatch);
  }

  SUBCASE("OvR scores are scale-normalized") {
    OvRModel m;
    m.dim = 2;
    m.classes = {"a", "b"};
    m.per_class.push_back(HoroClassifier{geometry::Horosphere(1.0, w, 1.0)});
    m.per_class.push_back(
        HoroClassifier{geometry::Horosphere(1.0, geometry::IdealPoint({-1.0, 0.0}), 1.0)});

    std::mt19937_64 rng(7);
    std::vector<double> coords;
    std::vector<std::string> dummy;
    for (int i = 0; i < 40; ++i) {
      const auto p = random_ball_point(2, rng);
      coords.insert(coords.end(), p.coords().begin(), p.coords().end());
      dummy.push_back("?");
    }
    const data::LabeledDataset pts(2, coords, dummy);
    const auto base = predict(m, pts);
    for (double c : {1e-3, 1e3}) {
      OvRModel scaled = m;
      scaled.per_class[0] =
          HoroClassifier{geometry::Horosphere(c * 1.0, w, c * 1.0)};
      CHECK(predict(scaled, pts) == base);
    }
  }

  SUBCASE("a dominating classifier wins") {
    OvRModel m;
    m.dim = 2;
    m.classes = {"near", "far"};
    m.per_class.push_back(HoroClassifier{geometry::Horosphere(1.0, w, 0.5)});
    m.per_class.push_back(HoroClassifier{geometry::Horosphere(1.0, w, 4.0)});
    data::LabeledDataset pts(2, {std::tanh(1.0), 0.0}, {"?"});
    CHECK(predict(m, pts)[0] == "near");
  }
}

TEST_CASE("downsampling caps the majority class") {
  std::vector<double> coords;
  std::vector<std::string> labels;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-0.3, 0.3);
  for (int i = 0; i < 90; ++i) { coords.push_back(unif(rng)); labels.push_back("-1"); }
  for (int i = 0; i < 10; ++i) { coords.push_back(unif(rng)); labels.push_back("+1"); }
  const data::LabeledDataset ds(1, coords, labels);

  const auto balanced = downsample_majority(ds, 1.0, 3);
  std::size_t pos = 0, neg = 0;
  for (std::size_t i = 0; i < balanced.count(); ++i) {
    (balanced.label(i) == "+1" ? pos : neg) += 1;
  }
  CHECK(pos == 10);
  CHECK(neg == 10);

  const auto wide = downsample_majority(ds, 3.0, 3);
  CHECK(wide.count() == 40);

  const auto untouched = downsample_majority(ds, 20.0, 3);
  CHECK(untouched.count() == 100);
}

TEST_CASE("convexity probe") {
  std::mt19937_64 rng(9);

  SUBCASE("no violations on either hemisphere") {
    for (int trial = 0; trial < 3; ++trial) {
      const auto x = random_ball_point(3, rng, 0.1, 0.85);
      const int y = trial % 2 == 0 ? 1 : -1;
      const auto report = convexity_probe(x, y, 1000, 100 + trial);
      CHECK(report.convex_violations == 0);
      CHECK(report.concave_violations == 0);
      CHECK(report.segments == 1000);
    }
  }

  SUBCASE("center sample is degenerate") {
    CHECK_THROWS_AS(convexity_probe(geometry::PoincarePoint::origin(3), 1, 10, 1),
                    DegeneratePoint);
  }
}

TEST_CASE("model serialization round trip") {
  const auto tmp = std::filesystem::temp_directory_path();

  SUBCASE("binary") {
    const auto ds = two_clusters(30, 3, 2.5, 0.6, 70);
    TrainConfig cfg;
    cfg.seed = 12;
    cfg.restarts = 2;
    const auto trained = train_binary_model(ds, cfg, LossKind::HoroSVM);
    const auto path = (tmp / "horosvm_model_bin.json").string();
    save_model(path, trained);
    const auto loaded = load_model(path);
    const auto* bin = std::get_if<BinaryModel>(&loaded);
    REQUIRE(bin != nullptr);
    CHECK(bin->pos_label == trained.pos_label);
    CHECK(bin->dim == 3);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
      const auto x = random_ball_point(3, rng);
      CHECK(std::abs(decision_value(bin->clf, x) - decision_value(trained.clf, x)) <=
            1e-12);
    }
  }

  SUBCASE("ovr") {
    OvRModel m;
    m.dim = 2;
    m.classes = {"a", "b"};
    m.per_class.push_back(HoroClassifier{geometry::Horosphere(
        1.2345678901234567, geometry::IdealPoint({0.6, 0.8}), 0.55)});
    m.per_class.push_back(HoroClassifier{geometry::Horosphere(
        2.0, geometry::IdealPoint({-1.0, 0.0}), 1.75)});
    const auto path = (tmp / "horosvm_model_ovr.json").string();
    save_model(path, m);
    const auto loaded = std::get<OvRModel>(load_model(path));
    CHECK(loaded.classes == m.classes);
    CHECK(loaded.per_class[0].boundary.mu == m.per_class[0].boundary.mu);
    CHECK(loaded.per_class[1].boundary.b == m.per_class[1].boundary.b);
  }

  SUBCASE("malformed files raise ParseError") {
    const auto path = (tmp / "horosvm_model_bad.json").string();
    {
      std::ofstream out(path);
      out << "{ not json";
    }
    CHECK_THROWS_AS(load_model(path), ParseError);
    {
      std::ofstream out(path);
      out << R"({"kind":"mystery","dim":2,"classes":[],"classifiers":[]})";
    }
    CHECK_THROWS_AS(load_model(path), ParseError);
  }
}

TEST_SUITE_END();
