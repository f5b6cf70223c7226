#include <doctest.h>

#include <cmath>

#include "dataset.hpp"
#include "test_util.hpp"

using namespace uregm;
using test_util::TempDir;
using test_util::write_file;

namespace {

const char* kSmallCsv =
    "sample_id,smell_type,wmc,loc,delta_cpu,delta_mem\n"
    "a,god_class,10,100,1.5,2.0\n"
    "b,god_method,12,,2.5,2.1\n"
    "c,spaghetti_code,14,140,3.5,2.2\n";

}  // namespace

TEST_CASE("load_csv drops rows with null cells") {
  TempDir tmp("load");
  const auto path = tmp.path("d.csv");
  write_file(path,
             "sample_id,smell_type,wmc,loc,delta_cpu,delta_mem\n"
             "a,god_class,10,100,1.5,2.0\n"
             "b,god_method,12,120,,2.1\n"
             "c,spaghetti_code,14,140,3.5,2.2\n");
  LoadSummary summary;
  const auto ds = load_csv(path, TargetKind::Cpu, &summary);
  CHECK(ds.rows() == 2);
  CHECK(summary.rows_dropped == 1);
  // Surviving rows keep file order and values untouched.
  CHECK(ds.sample_ids[0] == "a");
  CHECK(ds.sample_ids[1] == "c");
  CHECK(ds.features(0, 0) == 10.0);
  CHECK(ds.features(1, 1) == 140.0);
  CHECK(ds.delta_cpu[1] == 3.5);
}

TEST_CASE("load_csv keeps all finite rows") {
  TempDir tmp("load");
  const auto path = tmp.path("d.csv");
  std::string csv = "sample_id,smell_type,wmc,loc,delta_cpu,delta_mem\n";
  for (int i = 0; i < 100; ++i) {
    csv += "s" + std::to_string(i) + ",god_class," + std::to_string(i) + "," +
           std::to_string(i * 2) + ",1.5,2.0\n";
  }
  write_file(path, csv);
  LoadSummary summary;
  const auto ds = load_csv(path, TargetKind::Cpu, &summary);
  CHECK(ds.rows() == 100);
  CHECK(summary.rows_dropped == 0);
}

TEST_CASE("load_csv rejects unknown smell tokens with row and token") {
  TempDir tmp("load");
  const auto path = tmp.path("d.csv");
  write_file(path,
             "sample_id,smell_type,wmc,delta_cpu,delta_mem\n"
             "a,god_class,10,1.5,2.0\n"
             "b,mega class,12,2.5,2.1\n");
  CHECK_THROWS_WITH_AS(load_csv(path, TargetKind::Cpu),
                       doctest::Contains("mega class"), std::runtime_error);
  try {
    load_csv(path, TargetKind::Cpu);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
}

TEST_CASE("load_csv error paths") {
  TempDir tmp("load");
  CHECK_THROWS_AS(load_csv(tmp.path("missing.csv"), TargetKind::Cpu),
                  std::runtime_error);

  const auto no_target = tmp.path("no_target.csv");
  write_file(no_target, "sample_id,smell_type,wmc,delta_mem\na,god_class,1,2\n");
  CHECK_THROWS_WITH_AS(load_csv(no_target, TargetKind::Cpu),
                       doctest::Contains("delta_cpu"), std::runtime_error);

  const auto all_null = tmp.path("all_null.csv");
  write_file(all_null,
             "sample_id,smell_type,wmc,delta_cpu,delta_mem\n"
             "a,god_class,,1.5,2.0\n");
  CHECK_THROWS_WITH_AS(load_csv(all_null, TargetKind::Cpu),
                       doctest::Contains("no rows"), std::runtime_error);

  const auto dup = tmp.path("dup.csv");
  write_file(dup,
             "sample_id,smell_type,wmc,delta_cpu,delta_mem\n"
             "a,god_class,1,1.5,2.0\n"
             "a,god_method,2,2.5,2.1\n");
  CHECK_THROWS_WITH_AS(load_csv(dup, TargetKind::Cpu),
                       doctest::Contains("duplicate sample_id"),
                       std::runtime_error);
}

TEST_CASE("load_csv accepts NA as null and mem target") {
  TempDir tmp("load");
  const auto path = tmp.path("d.csv");
  write_file(path,
             "sample_id,smell_type,wmc,delta_cpu,delta_mem\n"
             "a,god_class,NA,1.5,2.0\n"
             "b,god_method,2,bad,2.1\n"
             "c,long_parameter,3,2.0,2.2\n");
  // Target mem: the malformed delta_cpu cell in row b is not a target cell.
  LoadSummary summary;
  const auto ds = load_csv(path, TargetKind::Memory, &summary);
  CHECK(ds.rows() == 2);
  CHECK(summary.rows_dropped == 1);  // only the NA feature row drops
  CHECK(ds.target()[0] == 2.1);
}

TEST_CASE("csv round trip via write_csv") {
  TempDir tmp("roundtrip");
  const auto path = tmp.path("d.csv");
  write_file(path, kSmallCsv);
  const auto ds = load_csv(path, TargetKind::Cpu);
  const auto out = tmp.path("out.csv");
  write_csv(ds, out);
  const auto ds2 = load_csv(out, TargetKind::Cpu);
  CHECK(ds2.rows() == ds.rows());
  CHECK(ds2.feature_names == ds.feature_names);
  CHECK(ds2.features == ds.features);
}

TEST_CASE("split produces an 80/20 partition") {
  auto ds = test_util::synthetic_dataset(
      100, 3, 11, [](const auto&, SplitMix64&) { return 1.0; });
  const auto [train, test] = split(ds, {0.8, 42});
  CHECK(train.rows() == 80);
  CHECK(test.rows() == 20);

  // Partition: together they cover every sample id exactly once.
  std::vector<std::string> ids;
  for (const auto& id : train.sample_ids) ids.push_back(id);
  for (const auto& id : test.sample_ids) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  CHECK(std::unique(ids.begin(), ids.end()) == ids.end());
  CHECK(ids.size() == 100);
}

TEST_CASE("split rejects degenerate partitions") {
  auto ds = test_util::synthetic_dataset(
      2, 2, 3, [](const auto&, SplitMix64&) { return 1.0; });
  CHECK_THROWS_WITH_AS(split(ds, {0.8, 1}), doctest::Contains("empty test"),
                       std::runtime_error);
  auto one = test_util::synthetic_dataset(
      1, 2, 3, [](const auto&, SplitMix64&) { return 1.0; });
  CHECK_THROWS_AS(split(one, {0.8, 1}), std::invalid_argument);
}

TEST_CASE("split is deterministic per seed") {
  auto ds = test_util::synthetic_dataset(
      50, 4, 5, [](const auto& row, SplitMix64&) { return row[0]; });
  const auto [a_train, a_test] = split(ds, {0.8, 7});
  const auto [b_train, b_test] = split(ds, {0.8, 7});
  CHECK(a_train.sample_ids == b_train.sample_ids);
  CHECK(a_test.sample_ids == b_test.sample_ids);
  const auto [c_train, c_test] = split(ds, {0.8, 8});
  CHECK(a_train.sample_ids != c_train.sample_ids);
}

TEST_CASE("standardize matches direct arithmetic") {
  Dataset ds;
  ds.feature_names = {"x"};
  ds.features.resize(3, 1);
  ds.features << 1, 2, 3;
  ds.delta_cpu.resize(3);
  ds.delta_cpu << 0, 0, 0;
  ds.delta_mem = ds.delta_cpu;
  ds.sample_ids = {"a", "b", "c"};

  // Population std of {1,2,3}: mean 2, variance 2/3.
  const double sd = std::sqrt(2.0 / 3.0);
  const auto [out, stats] = standardize(ds);
  CHECK(out.features(0, 0) == doctest::Approx(-1.0 / sd).epsilon(1e-12));
  CHECK(out.features(0, 0) == doctest::Approx(-1.2247).epsilon(1e-4));
  CHECK(out.features(1, 0) == doctest::Approx(0.0));
  CHECK(out.features(2, 0) == doctest::Approx(1.2247).epsilon(1e-4));
  CHECK_FALSE(stats.zero_variance[0]);
}

TEST_CASE("standardize flags constant columns") {
  Dataset ds;
  ds.feature_names = {"x", "y"};
  ds.features.resize(3, 2);
  ds.features << 5, 1, 5, 2, 5, 3;
  ds.delta_cpu = Eigen::VectorXd::Zero(3);
  ds.delta_mem = ds.delta_cpu;
  ds.sample_ids = {"a", "b", "c"};
  const auto [out, stats] = standardize(ds);
  CHECK(stats.zero_variance[0]);
  CHECK_FALSE(stats.zero_variance[1]);
  CHECK(out.features.col(0).isZero());
}

TEST_CASE("standardize is idempotent on standardized input") {
  auto ds = test_util::synthetic_dataset(
      40, 3, 17, [](const auto&, SplitMix64&) { return 0.0; });
  const auto [once, stats1] = standardize(ds);
  const auto [twice, stats2] = standardize(once);
  CHECK((twice.features - once.features).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("standardize round trips through inverse") {
  auto ds = test_util::synthetic_dataset(
      30, 4, 23, [](const auto&, SplitMix64&) { return 0.0; });
  ds.features.col(2).setConstant(7.5);  // one flagged column
  const auto [out, stats] = standardize(ds);
  const Eigen::MatrixXd back = stats.inverse(out.features);
  for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
      const double expected = ds.features(i, j);
      const double got = back(i, j);
      CHECK(std::abs(got - expected) <=
            1e-10 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("feature mask helpers") {
  FeatureMask mask = FeatureMask::none(4);
  CHECK_FALSE(mask.any());
  mask.bits[2] = 1;
  CHECK(mask.count() == 1);
  CHECK(mask.selected() == std::vector<std::size_t>{2});
  const auto all = FeatureMask::all(3);
  CHECK(all.count() == 3);

  FeatureMask a = FeatureMask::none(3), b = FeatureMask::none(3);
  a.bits = {1, 0, 0};
  b.bits = {1, 1, 0};
  CHECK(FeatureMask::prefer(a, b));   // fewer bits wins
  b.bits = {0, 1, 0};
  CHECK(FeatureMask::prefer(b, a));   // same count: lexicographically smaller
}
