#include <doctest.h>

#include <cmath>
#include <sstream>

#include "evaluation.hpp"
#include "serialize.hpp"
#include "simulator.hpp"
#include "test_util.hpp"

using namespace uregm;

namespace {

LearnerConfigMap fast_configs() {
  auto cfgs = default_learner_configs();
  cfgs[LearnerKind::RF].rf_trees = 20;
  return cfgs;
}

const std::vector<ModelLabel> kAllLabels = {ModelLabel::LiR, ModelLabel::PR,
                                            ModelLabel::LR, ModelLabel::RF,
                                            ModelLabel::Reap, ModelLabel::Uregm};

EvaluationReport sample_report() {
  GenConfig cfg;
  cfg.rows = 150;
  cfg.seed = 3;
  const auto ds = generate(cfg);
  return kfold_evaluate(ds, FeatureMask::all(ds.num_features()), kAllLabels, 5,
                        7, fast_configs());
}

}  // namespace

TEST_CASE("kfold_evaluate covers requested labels with the containment bound") {
  const auto report = sample_report();
  REQUIRE(report.models.size() == 6);
  for (std::size_t i = 0; i < kAllLabels.size(); ++i) {
    CHECK(report.models[i].first == kAllLabels[i]);
  }

  double best_singleton = 0.0;
  double uregm_accuracy = 0.0;
  for (const auto& [label, m] : report.models) {
    if (label == ModelLabel::Uregm) uregm_accuracy = m.accuracy_value;
    else if (label != ModelLabel::Reap) {
      best_singleton = std::max(best_singleton, m.accuracy_value);
    }
    CHECK(m.rmse_value() == std::sqrt(m.mse_value));
    CHECK(m.eval_time_s >= 0.0);
  }
  CHECK(uregm_accuracy >= best_singleton);
}

TEST_CASE("kfold_evaluate is deterministic and parallel-invariant") {
  GenConfig gen;
  gen.rows = 120;
  gen.seed = 11;
  const auto ds = generate(gen);
  const auto mask = FeatureMask::all(ds.num_features());
  const auto cfgs = fast_configs();
  const auto a = kfold_evaluate(ds, mask, kAllLabels, 4, 13, cfgs, 1);
  const auto b = kfold_evaluate(ds, mask, kAllLabels, 4, 13, cfgs, 1);
  CHECK(report_to_json(a).dump() == report_to_json(b).dump());
  const auto c = kfold_evaluate(ds, mask, kAllLabels, 4, 13, cfgs, 4);
  CHECK(report_to_json(a).dump() == report_to_json(c).dump());
}

TEST_CASE("kfold_evaluate singleton rows equal the ensemble's member columns") {
  // The LiR row and the LiR column inside the uregm search use the same
  // derived streams, which is what makes the containment bound exact.
  GenConfig gen;
  gen.rows = 90;
  gen.seed = 17;
  const auto ds = generate(gen);
  const auto mask = FeatureMask::all(ds.num_features());
  const auto cfgs = fast_configs();
  const auto report =
      kfold_evaluate(ds, mask, {ModelLabel::LiR}, 5, 19, cfgs);
  const auto model = uregm_search(ds, mask, cfgs, 5, 19);
  CHECK(report.models[0].second.accuracy_value ==
        doctest::Approx(model.search_log[0].score).epsilon(1e-12));
}

TEST_CASE("kfold_evaluate rejects duplicates and empty requests") {
  GenConfig gen;
  gen.rows = 40;
  gen.seed = 23;
  const auto ds = generate(gen);
  const auto mask = FeatureMask::all(ds.num_features());
  CHECK_THROWS_AS(kfold_evaluate(ds, mask, {}, 5, 1, fast_configs()),
                  std::invalid_argument);
  CHECK_THROWS_AS(kfold_evaluate(ds, mask, {ModelLabel::LiR, ModelLabel::LiR},
                                 5, 1, fast_configs()),
                  std::invalid_argument);
}

TEST_CASE("render_report text layout") {
  const auto report = sample_report();
  const auto text = render_report(report, ReportFormat::Text);
  for (const auto& [label, m] : report.models) {
    CHECK(text.find(to_string(label)) != std::string::npos);
  }
  CHECK(text.find("mse") != std::string::npos);
  CHECK(text.find("rmse") != std::string::npos);
  CHECK(text.find("accuracy (%)") != std::string::npos);
  CHECK(text.find("time (s)") != std::string::npos);
}

TEST_CASE("render_report json and csv agree") {
  const auto report = sample_report();
  const auto j = json::parse(render_report(report, ReportFormat::Json));
  const auto csv = render_report(report, ReportFormat::Csv);

  CHECK(j.at("accuracy_definition") == "100-MAPE");
  CHECK(j.at("format_version") == 1);
  CHECK(j.at("folds") == 5);
  CHECK(j.at("dataset").at("rows") == 150);

  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "model,mse,rmse,accuracy,accuracy_excluded,time_s");
  std::size_t row_count = 0;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string label, mse_s, rmse_s, acc_s, excl_s, time_s;
    std::getline(cells, label, ',');
    std::getline(cells, mse_s, ',');
    std::getline(cells, rmse_s, ',');
    std::getline(cells, acc_s, ',');
    std::getline(cells, excl_s, ',');
    std::getline(cells, time_s, ',');
    const auto& entry = j.at("models").at(label);
    // Lossless round trip: csv cells parse back to the json values exactly.
    CHECK(std::stod(mse_s) == entry.at("mse").get<double>());
    CHECK(std::stod(rmse_s) == entry.at("rmse").get<double>());
    CHECK(std::stod(acc_s) == entry.at("accuracy").get<double>());
    CHECK(std::stod(rmse_s) == doctest::Approx(std::sqrt(std::stod(mse_s))));
    ++row_count;
  }
  CHECK(row_count == report.models.size());

  // Canonical artifacts zero the wall-time fields.
  for (const auto& [label, entry] : j.at("models").items()) {
    CHECK(entry.at("time_s") == 0.0);
  }
}
