#include "evaluation.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"
#include "serialize.hpp"

namespace uregm {

const char* to_string(ModelLabel label) {
  switch (label) {
    case ModelLabel::LiR: return "LiR";
    case ModelLabel::PR: return "PR";
    case ModelLabel::LR: return "LR";
    case ModelLabel::RF: return "RF";
    case ModelLabel::Reap: return "REAP-analogue";
    case ModelLabel::Uregm: return "URegM";
  }
  return "?";
}

const char* label_token(ModelLabel label) {
  switch (label) {
    case ModelLabel::LiR: return "lir";
    case ModelLabel::PR: return "pr";
    case ModelLabel::LR: return "lr";
    case ModelLabel::RF: return "rf";
    case ModelLabel::Reap: return "reap";
    case ModelLabel::Uregm: return "uregm";
  }
  return "?";
}

bool parse_model_label(const std::string& token, ModelLabel& out) {
  for (int i = 0; i <= static_cast<int>(ModelLabel::Uregm); ++i) {
    const auto label = static_cast<ModelLabel>(i);
    if (token == label_token(label)) {
      out = label;
      return true;
    }
  }
  return false;
}

EvaluationReport kfold_evaluate(const Dataset& ds, const FeatureMask& mask,
                                const std::vector<ModelLabel>& labels,
                                std::size_t folds, std::uint64_t seed,
                                const LearnerConfigMap& cfgs,
                                std::size_t jobs) {
  if (labels.empty()) throw std::invalid_argument("evaluate: no models requested");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      if (labels[i] == labels[j]) {
        throw std::invalid_argument("evaluate: duplicate model label");
      }
    }
  }

  EvaluationReport report;
  report.models.resize(labels.size());
  report.folds = folds;
  report.seed = seed;
  report.dataset_rows = ds.rows();
  report.dataset_features = ds.feature_names;

  parallel_for(labels.size(), jobs, [&](std::size_t i) {
    const ModelLabel label = labels[i];
    const auto t0 = std::chrono::steady_clock::now();
    Metrics m;
    switch (label) {
      case ModelLabel::LiR:
      case ModelLabel::PR:
      case ModelLabel::LR:
      case ModelLabel::RF: {
        const auto kind = static_cast<LearnerKind>(label);
        const Eigen::MatrixXd oof =
            oof_predictions(ds, mask, {kind}, folds, seed, cfgs, 1);
        m = compute_metrics(oof.col(0), ds.target());
        break;
      }
      case ModelLabel::Uregm: {
        // The report row is exactly what the search scored: the winning
        // blend of the shared-fold out-of-fold predictions.
        const UregmModel model = uregm_search(ds, mask, cfgs, folds, seed, 1);
        m.mse_value = model.best.mse_value;
        m.accuracy_value = model.best.score;
        m.accuracy_excluded = model.best.accuracy_excluded;
        break;
      }
      case ModelLabel::Reap: {
        const UregmModel model = reap_baseline(ds, mask, cfgs, folds, seed, 1);
        m.mse_value = model.best.mse_value;
        m.accuracy_value = model.best.score;
        m.accuracy_excluded = model.best.accuracy_excluded;
        break;
      }
    }
    const auto t1 = std::chrono::steady_clock::now();
    m.eval_time_s = std::chrono::duration<double>(t1 - t0).count();
    report.models[i] = {label, m};
  });

  return report;
}

namespace {

std::string format_cell(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << v;
  return out.str();
}

}  // namespace

std::string render_report(const EvaluationReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) {
    return report_to_json(report).dump(2) + "\n";
  }
  if (format == ReportFormat::Csv) {
    std::ostringstream out;
    out << "model,mse,rmse,accuracy,accuracy_excluded,time_s\n";
    for (const auto& [label, m] : report.models) {
      out << to_string(label) << ',' << format_double(m.mse_value) << ','
          << format_double(m.rmse_value()) << ','
          << format_double(m.accuracy_value) << ',' << m.accuracy_excluded
          << ",0\n";
    }
    return out.str();
  }

  std::vector<std::string> headers = {"metric"};
  for (const auto& [label, m] : report.models) headers.emplace_back(to_string(label));
  std::vector<std::vector<std::string>> grid;
  grid.push_back(headers);
  const std::array<const char*, 4> metric_rows = {"mse", "rmse", "accuracy (%)",
                                                  "time (s)"};
  for (std::size_t r = 0; r < metric_rows.size(); ++r) {
    std::vector<std::string> row = {metric_rows[r]};
    for (const auto& [label, m] : report.models) {
      switch (r) {
        case 0: row.push_back(format_cell(m.mse_value)); break;
        case 1: row.push_back(format_cell(m.rmse_value())); break;
        case 2: row.push_back(format_cell(m.accuracy_value)); break;
        case 3: row.push_back(format_cell(m.eval_time_s)); break;
      }
    }
    grid.push_back(row);
  }

  std::vector<std::size_t> widths(grid[0].size(), 0);
  for (const auto& row : grid) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::ostringstream out;
  out << "rows=" << report.dataset_rows << " folds=" << report.folds
      << " seed=" << report.seed
      << " accuracy=" << report.accuracy_definition << "\n";
  for (std::size_t r = 0; r < grid.size(); ++r) {
    for (std::size_t c = 0; c < grid[r].size(); ++c) {
      if (c > 0) out << "  ";
      out << std::left << std::setw(static_cast<int>(widths[c])) << grid[r][c];
    }
    out << "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < widths.size(); ++c) total += widths[c] + (c ? 2 : 0);
      out << std::string(total, '-') << "\n";
    }
  }
  return out.str();
}

}  // namespace uregm
