#include <doctest.h>

#include <cmath>

#include "metrics.hpp"
#include "rng.hpp"

using namespace uregm;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("mse basics") {
  CHECK(mse(vec({1, 2, 3}), vec({1, 2, 3})) == 0.0);
  // ((3.6-3.8)^2 + (4.0-4.1)^2) / 2 = (0.04 + 0.01) / 2
  CHECK(mse(vec({3.6, 4.0}), vec({3.8, 4.1})) == doctest::Approx(0.025).epsilon(1e-12));
  // Constant offset c gives c^2.
  CHECK(mse(vec({2, 3, 4}), vec({0, 1, 2})) == doctest::Approx(4.0));
  CHECK_THROWS_AS(mse(vec({1}), vec({1, 2})), std::invalid_argument);
  CHECK_THROWS_AS(mse(Eigen::VectorXd(), Eigen::VectorXd()), std::invalid_argument);
}

TEST_CASE("mse scale covariance") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd p(20), y(20);
    for (int i = 0; i < 20; ++i) {
      p[i] = rng.next_normal();
      y[i] = rng.next_normal();
    }
    const double a = 0.1 + rng.next_double() * 9.9;
    CHECK(mse(a * p, a * y) == doctest::Approx(a * a * mse(p, y)).epsilon(1e-12));
  }
}

TEST_CASE("accuracy basics") {
  CHECK(accuracy(vec({1, 2, 3}), vec({1, 2, 3})) == 100.0);
  CHECK(accuracy(vec({4.0}), vec({5.0})) == doctest::Approx(80.0).epsilon(1e-12));
  // MAPE of 200% floors at 0.
  CHECK(accuracy(vec({15.0}), vec({5.0})) == 0.0);
}

TEST_CASE("accuracy excludes near-zero actuals") {
  std::size_t excluded = 0;
  const double acc = accuracy(vec({4.0, 9.0}), vec({5.0, 0.0}), &excluded);
  CHECK(excluded == 1);
  CHECK(acc == doctest::Approx(80.0));
  CHECK_THROWS_AS(accuracy(vec({1.0}), vec({0.0})), std::invalid_argument);
}

TEST_CASE("accuracy is scale invariant") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd p(15), y(15);
    for (int i = 0; i < 15; ++i) {
      p[i] = rng.next_normal();
      y[i] = 0.5 + rng.next_double() * 5.0;
    }
    const double a = 0.1 + rng.next_double() * 9.9;
    CHECK(std::abs(accuracy(a * p, a * y) - accuracy(p, y)) < 1e-9);
  }
}

TEST_CASE("rmse is definitional") {
  Metrics m = compute_metrics(vec({3.6, 4.0}), vec({3.8, 4.1}));
  CHECK(m.rmse_value() == std::sqrt(m.mse_value));
  CHECK(m.accuracy_value >= 0.0);
  CHECK(m.accuracy_value <= 100.0);
}

TEST_CASE("kfold partitions are balanced, exhaustive and deterministic") {
  const auto fold_of = kfold_partition(23, 5, 91);
  REQUIRE(fold_of.size() == 23);
  std::vector<int> counts(5, 0);
  for (int f : fold_of) {
    REQUIRE(f >= 0);
    REQUIRE(f < 5);
    ++counts[static_cast<std::size_t>(f)];
  }
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  CHECK(*hi - *lo <= 1);
  CHECK(fold_of == kfold_partition(23, 5, 91));
  CHECK(fold_of != kfold_partition(23, 5, 92));

  CHECK_THROWS_AS(kfold_partition(3, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(kfold_partition(10, 1, 1), std::invalid_argument);
}
