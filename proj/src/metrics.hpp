#ifndef UREGM_METRICS_HPP
#define UREGM_METRICS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace uregm {

// Mean squared error. Lengths must match and be non-zero.
double mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& actual);

// Accuracy as 100 - mean absolute percentage error, floored at 0. Rows with
// |actual| <= 1e-9 are excluded from the mean; excluded_rows (when non-null)
// receives their count. Errors out if every row is excluded.
double accuracy(const Eigen::VectorXd& pred, const Eigen::VectorXd& actual,
                std::size_t* excluded_rows = nullptr);

struct Metrics {
  double mse_value = 0.0;
  double accuracy_value = 0.0;
  std::size_t accuracy_excluded = 0;
  double eval_time_s = 0.0;

  // rmse is definitional, never stored independently.
  double rmse_value() const;
};

Metrics compute_metrics(const Eigen::VectorXd& pred,
                        const Eigen::VectorXd& actual);

// Deterministic k-fold assignment: shuffled row indices cut into folds whose
// sizes differ by at most one. Returns fold id per row.
std::vector<int> kfold_partition(std::size_t n, std::size_t folds,
                                 std::uint64_t seed);

}  // namespace uregm

#endif
