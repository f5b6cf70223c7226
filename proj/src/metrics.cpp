#include "metrics.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rng.hpp"

namespace uregm {

double mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& actual) {
  if (pred.size() != actual.size()) {
    throw std::invalid_argument("mse: length mismatch");
  }
  if (pred.size() == 0) throw std::invalid_argument("mse: empty input");
  if (!pred.allFinite() || !actual.allFinite()) {
    throw std::invalid_argument("mse: non-finite input");
  }
  return (pred - actual).squaredNorm() / static_cast<double>(pred.size());
}

double accuracy(const Eigen::VectorXd& pred, const Eigen::VectorXd& actual,
                std::size_t* excluded_rows) {
  if (pred.size() != actual.size()) {
    throw std::invalid_argument("accuracy: length mismatch");
  }
  if (pred.size() == 0) throw std::invalid_argument("accuracy: empty input");
  double sum_ape = 0.0;
  std::size_t used = 0;
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    if (std::abs(actual[i]) <= 1e-9) continue;
    sum_ape += std::abs(pred[i] - actual[i]) / std::abs(actual[i]);
    ++used;
  }
  if (excluded_rows) {
    *excluded_rows = static_cast<std::size_t>(pred.size()) - used;
  }
  if (used == 0) {
    throw std::invalid_argument("accuracy: all rows excluded (|actual| <= 1e-9)");
  }
  const double mape = sum_ape / static_cast<double>(used);
  return 100.0 * std::max(0.0, 1.0 - mape);
}

double Metrics::rmse_value() const { return std::sqrt(mse_value); }

Metrics compute_metrics(const Eigen::VectorXd& pred,
                        const Eigen::VectorXd& actual) {
  Metrics m;
  m.mse_value = mse(pred, actual);
  m.accuracy_value = accuracy(pred, actual, &m.accuracy_excluded);
  return m;
}

std::vector<int> kfold_partition(std::size_t n, std::size_t folds,
                                 std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("kfold: folds must be >= 2");
  if (n < folds) throw std::invalid_argument("kfold: folds exceed rows");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = derive_stream(seed, {stream_tag::kKfold});
  shuffle(order, rng);

  std::vector<int> fold_of(n);
  const std::size_t base = n / folds;
  const std::size_t extra = n % folds;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    for (std::size_t k = 0; k < len; ++k) fold_of[order[pos++]] = static_cast<int>(f);
  }
  return fold_of;
}

}  // namespace uregm
