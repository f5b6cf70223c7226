#include <doctest.h>

#include <cmath>

#include "learners.hpp"
#include "metrics.hpp"
#include "test_util.hpp"

using namespace uregm;

namespace {

Dataset line_dataset() {
  // y = 2x + 1 over x = 0, 1, 2.
  Dataset ds;
  ds.feature_names = {"x"};
  ds.features.resize(3, 1);
  ds.features << 0, 1, 2;
  ds.delta_cpu.resize(3);
  ds.delta_cpu << 1, 3, 5;
  ds.delta_mem = ds.delta_cpu;
  ds.sample_ids = {"a", "b", "c"};
  return ds;
}

}  // namespace

TEST_CASE("LiR recovers an exact affine relation") {
  const auto ds = line_dataset();
  const auto model =
      train(ds, FeatureMask::all(1), LearnerConfig::for_kind(LearnerKind::LiR));
  const auto [intercept, slopes] = model.original_coefficients();
  CHECK(intercept == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(slopes[0] == doctest::Approx(2.0).epsilon(1e-9));

  // Affine evaluation at x = 3 through predict.
  Dataset query = ds;
  query.features.resize(1, 1);
  query.features << 3;
  query.delta_cpu.resize(1);
  query.delta_mem.resize(1);
  query.sample_ids = {"q"};
  query.smell_types.clear();
  CHECK(predict(model, query)[0] == doctest::Approx(7.0).epsilon(1e-9));

  // Training-set mse composed with the metrics oracle.
  CHECK(mse(predict(model, ds), ds.target()) < 1e-12);
}

TEST_CASE("PR with degree 1 reproduces LiR") {
  auto ds = test_util::synthetic_dataset(60, 4, 31, [](const auto& row, SplitMix64& rng) {
    return 2.0 * row[0] - row[2] + 0.01 * rng.next_normal();
  });
  auto lir_cfg = LearnerConfig::for_kind(LearnerKind::LiR);
  auto pr_cfg = LearnerConfig::for_kind(LearnerKind::PR);
  pr_cfg.poly_degree = 1;
  const auto lir = train(ds, FeatureMask::all(4), lir_cfg);
  const auto pr = train(ds, FeatureMask::all(4), pr_cfg);
  const auto& lw = std::get<LinearParams>(lir.params).weights;
  const auto& pw = std::get<LinearParams>(pr.params).weights;
  REQUIRE(lw.size() == pw.size());
  CHECK((lw - pw).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("PR degree 2 captures squares and interactions") {
  auto ds = test_util::synthetic_dataset(80, 2, 37, [](const auto& row, SplitMix64&) {
    return row[0] * row[0] + 0.5 * row[0] * row[1] - row[1];
  });
  auto cfg = LearnerConfig::for_kind(LearnerKind::PR);
  const auto model = train(ds, FeatureMask::all(2), cfg);
  CHECK(mse(predict(model, ds), ds.target()) < 1e-12);
}

TEST_CASE("polynomial expansion layout and cap") {
  // 2 features, degree 2: f1, f1^2, f2, f2^2, f1*f2.
  const auto terms = poly_expansion(2, 2);
  CHECK(terms.size() == 5);
  // 40 features at degree 2 needs 80 + 780 columns, above the cap.
  CHECK_THROWS_AS(poly_expansion(40, 2), std::runtime_error);
}

TEST_CASE("lasso in the penalty-free limit matches OLS") {
  auto ds = test_util::synthetic_dataset(200, 5, 41, [](const auto& row, SplitMix64& rng) {
    return 1.5 * row[0] - 2.0 * row[1] + 0.7 * row[3] + 0.05 * rng.next_normal();
  });
  auto ols_cfg = LearnerConfig::for_kind(LearnerKind::LiR);
  auto lasso_cfg = LearnerConfig::for_kind(LearnerKind::LR);
  lasso_cfg.lasso_lambda = 1e-8;
  const auto ols = train(ds, FeatureMask::all(5), ols_cfg);
  const auto lasso = train(ds, FeatureMask::all(5), lasso_cfg);
  const auto& ow = std::get<LinearParams>(ols.params).weights;
  const auto& lw = std::get<LinearParams>(lasso.params).weights;
  CHECK((ow - lw).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("lasso shrinks everything at huge lambda") {
  auto ds = test_util::synthetic_dataset(100, 4, 43, [](const auto& row, SplitMix64&) {
    return 3.0 * row[0] + row[1];
  });
  auto cfg = LearnerConfig::for_kind(LearnerKind::LR);
  cfg.lasso_lambda = 1e6;
  const auto model = train(ds, FeatureMask::all(4), cfg);
  const auto& params = std::get<LinearParams>(model.params);
  CHECK(params.weights.cwiseAbs().maxCoeff() == 0.0);
  CHECK(params.intercept == doctest::Approx(ds.target().mean()).epsilon(1e-12));
}

TEST_CASE("lasso objective is non-increasing across sweeps") {
  SplitMix64 rng(53);
  Eigen::MatrixXd x(50, 6);
  Eigen::VectorXd y(50);
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 6; ++j) x(i, j) = rng.next_normal();
    y[i] = x(i, 0) - 2.0 * x(i, 1) + rng.next_normal();
  }
  const double lambda = 0.05;
  auto objective = [&](const Eigen::VectorXd& beta) {
    return (y - x * beta).squaredNorm() / (2.0 * 50.0) +
           lambda * beta.cwiseAbs().sum();
  };
  double previous = objective(Eigen::VectorXd::Zero(6));
  for (int sweeps = 1; sweeps <= 12; ++sweeps) {
    // tol 0 never triggers the early stop, so exactly `sweeps` passes run.
    const auto beta = lasso_coordinate_descent(x, y, lambda, sweeps, 0.0);
    const double value = objective(beta);
    CHECK(value <= previous + 1e-12);
    previous = value;
  }
}

TEST_CASE("OLS residuals are orthogonal to the design") {
  auto ds = test_util::synthetic_dataset(120, 6, 59, [](const auto& row, SplitMix64& rng) {
    return row[0] + row[4] + 0.2 * rng.next_normal();
  });
  const auto model =
      train(ds, FeatureMask::all(6), LearnerConfig::for_kind(LearnerKind::LiR));
  const auto& lin = std::get<LinearParams>(model.params);
  const Eigen::MatrixXd z = model.norm.transform(ds.features);
  const Eigen::MatrixXd design = apply_expansion(z, lin.terms);
  const Eigen::VectorXd residual =
      ds.target() - (design * lin.weights).array().matrix() -
      Eigen::VectorXd::Constant(ds.features.rows(), lin.intercept);
  CHECK((design.transpose() * residual).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("duplicating rows leaves linear-family coefficients unchanged") {
  auto ds = test_util::synthetic_dataset(40, 3, 61, [](const auto& row, SplitMix64& rng) {
    return row[0] - row[1] + 0.1 * rng.next_normal();
  });
  std::vector<std::size_t> doubled;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    doubled.push_back(i);
    doubled.push_back(i);
  }
  auto ds2 = ds.subset(doubled);
  ds2.sample_ids.clear();
  for (std::size_t i = 0; i < doubled.size(); ++i) {
    ds2.sample_ids.push_back("d" + std::to_string(i));
  }
  for (auto kind : {LearnerKind::LiR, LearnerKind::PR, LearnerKind::LR}) {
    const auto a = train(ds, FeatureMask::all(3), LearnerConfig::for_kind(kind));
    const auto b = train(ds2, FeatureMask::all(3), LearnerConfig::for_kind(kind));
    const auto& wa = std::get<LinearParams>(a.params).weights;
    const auto& wb = std::get<LinearParams>(b.params).weights;
    CHECK((wa - wb).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("RF trained on a constant target predicts it everywhere") {
  auto ds = test_util::synthetic_dataset(
      30, 3, 67, [](const auto&, SplitMix64&) { return 5.0; });
  auto cfg = LearnerConfig::for_kind(LearnerKind::RF);
  cfg.rf_trees = 7;
  const auto model = train(ds, FeatureMask::all(3), cfg);
  const auto preds = predict(model, ds);
  for (Eigen::Index i = 0; i < preds.size(); ++i) CHECK(preds[i] == 5.0);
}

TEST_CASE("RF with one all-data leaf is a constant predictor") {
  auto ds = test_util::synthetic_dataset(25, 2, 71, [](const auto& row, SplitMix64&) {
    return row[0] * 2.0;
  });
  auto cfg = LearnerConfig::for_kind(LearnerKind::RF);
  cfg.rf_trees = 1;
  cfg.rf_min_leaf = 25;
  const auto model = train(ds, FeatureMask::all(2), cfg);
  const auto preds = predict(model, ds);
  for (Eigen::Index i = 1; i < preds.size(); ++i) CHECK(preds[i] == preds[0]);
  CHECK(preds[0] >= ds.target().minCoeff());
  CHECK(preds[0] <= ds.target().maxCoeff());
}

TEST_CASE("RF predictions stay within the training target range") {
  auto ds = test_util::synthetic_dataset(80, 3, 73, [](const auto& row, SplitMix64& rng) {
    return 3.0 * row[0] + rng.next_normal();
  });
  auto cfg = LearnerConfig::for_kind(LearnerKind::RF);
  cfg.rf_trees = 20;
  const auto model = train(ds, FeatureMask::all(3), cfg);
  auto probe = test_util::synthetic_dataset(
      40, 3, 99, [](const auto&, SplitMix64&) { return 0.0; });
  const auto preds = predict(model, probe);
  for (Eigen::Index i = 0; i < preds.size(); ++i) {
    CHECK(preds[i] >= ds.target().minCoeff());
    CHECK(preds[i] <= ds.target().maxCoeff());
  }
}

TEST_CASE("RF is deterministic under a fixed seed") {
  auto ds = test_util::synthetic_dataset(60, 4, 79, [](const auto& row, SplitMix64& rng) {
    return row[0] - row[1] + 0.3 * rng.next_normal();
  });
  auto cfg = LearnerConfig::for_kind(LearnerKind::RF);
  cfg.rf_trees = 15;
  cfg.seed = 1234;
  const auto a = predict(train(ds, FeatureMask::all(4), cfg), ds);
  const auto b = predict(train(ds, FeatureMask::all(4), cfg), ds);
  CHECK(a == b);
  // And parallel tree construction changes nothing.
  const auto c = predict(train(ds, FeatureMask::all(4), cfg, 4), ds);
  CHECK(a == c);
}

TEST_CASE("train validates its inputs") {
  auto ds = test_util::synthetic_dataset(
      10, 2, 83, [](const auto&, SplitMix64&) { return 1.0; });
  CHECK_THROWS_AS(train(ds, FeatureMask::none(2), LearnerConfig{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(train(ds, FeatureMask::all(3), LearnerConfig{}),
                  std::invalid_argument);
  auto bad = LearnerConfig::for_kind(LearnerKind::PR);
  bad.poly_degree = 0;
  CHECK_THROWS_AS(train(ds, FeatureMask::all(2), bad), std::invalid_argument);
}

TEST_CASE("predict reports missing feature columns by name") {
  auto ds = test_util::synthetic_dataset(
      20, 2, 89, [](const auto& row, SplitMix64&) { return row[0]; });
  const auto model =
      train(ds, FeatureMask::all(2), LearnerConfig::for_kind(LearnerKind::LiR));
  Dataset other = ds;
  other.feature_names = {"f1", "zzz"};
  CHECK_THROWS_WITH_AS(predict(model, other), doctest::Contains("f2"),
                       std::runtime_error);
}

TEST_CASE("zero-variance columns train without ridge fallback") {
  auto ds = test_util::synthetic_dataset(
      50, 3, 97, [](const auto& row, SplitMix64&) { return row[0] + 1.0; });
  ds.features.col(1).setConstant(4.0);
  const auto model =
      train(ds, FeatureMask::all(3), LearnerConfig::for_kind(LearnerKind::LiR));
  const auto& lin = std::get<LinearParams>(model.params);
  CHECK_FALSE(lin.ridge_fallback);
  CHECK(lin.weights[1] == 0.0);
  CHECK(mse(predict(model, ds), ds.target()) < 1e-12);
}

TEST_CASE("underdetermined OLS falls back to ridge") {
  auto ds = test_util::synthetic_dataset(
      4, 6, 101, [](const auto& row, SplitMix64&) { return row[0]; });
  const auto model =
      train(ds, FeatureMask::all(6), LearnerConfig::for_kind(LearnerKind::LiR));
  const auto& lin = std::get<LinearParams>(model.params);
  CHECK(lin.ridge_fallback);
  CHECK(lin.ridge_lambda > 0.0);
  CHECK(predict(model, ds).allFinite());
}
