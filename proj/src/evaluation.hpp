#ifndef UREGM_EVALUATION_HPP
#define UREGM_EVALUATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "ensemble.hpp"
#include "metrics.hpp"

namespace uregm {

// A row of the comparison report; the six labels the harness knows.
enum class ModelLabel { LiR = 0, PR = 1, LR = 2, RF = 3, Reap = 4, Uregm = 5 };

const char* to_string(ModelLabel label);  // display names ("REAP-analogue", ...)
const char* label_token(ModelLabel label);  // CLI tokens ("reap", "uregm", ...)
bool parse_model_label(const std::string& token, ModelLabel& out);

struct EvaluationReport {
  std::vector<std::pair<ModelLabel, Metrics>> models;  // requested order
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  std::size_t dataset_rows = 0;
  std::vector<std::string> dataset_features;
  std::string accuracy_definition = "100-MAPE";
};

// Evaluates every requested model on one shared fold partition. Base learners
// are scored on their pooled out-of-fold predictions; the two ensembles are
// scored on their blended out-of-fold predictions over the same folds, so the
// unified model's accuracy can never fall below its best member's (the
// singletons are inside its search space). eval_time is each model's own
// train+predict wall time.
EvaluationReport kfold_evaluate(const Dataset& ds, const FeatureMask& mask,
                                const std::vector<ModelLabel>& labels,
                                std::size_t folds, std::uint64_t seed,
                                const LearnerConfigMap& cfgs,
                                std::size_t jobs = 1);

enum class ReportFormat { Text = 0, Json = 1, Csv = 2 };

// Text mirrors the measurement-table layout (metrics as rows, models as
// columns) and shows measured wall times. Json and csv are canonical artifact
// renderings: values round-trip losslessly and timing fields are written as 0
// so artifacts are byte-reproducible; measured times belong to run manifests.
std::string render_report(const EvaluationReport& report, ReportFormat format);

}  // namespace uregm

#endif
