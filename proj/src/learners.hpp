#ifndef UREGM_LEARNERS_HPP
#define UREGM_LEARNERS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "dataset.hpp"

namespace uregm {

// The four base regressors: linear, polynomial, lasso, random forest.
enum class LearnerKind { LiR = 0, PR = 1, LR = 2, RF = 3 };
inline constexpr int kNumLearnerKinds = 4;

const char* to_string(LearnerKind k);

struct LearnerConfig {
  LearnerKind kind = LearnerKind::LiR;
  int poly_degree = 2;            // PR
  double lasso_lambda = 0.1;      // LR
  int lasso_max_sweeps = 1000;    // LR
  double lasso_tol = 1e-8;        // LR
  int rf_trees = 100;             // RF
  int rf_max_depth = 12;          // RF
  int rf_min_leaf = 2;            // RF
  double rf_feature_subsample = 1.0 / 3.0;  // RF, fraction of selected features per node
  std::uint64_t seed = 0;

  static LearnerConfig for_kind(LearnerKind k, std::uint64_t seed = 0);
};

// One basis term of the polynomial expansion: f2 < 0 marks a univariate
// power, otherwise the term is z[f1]^p1 * z[f2]^p2. Indices address the
// selected (masked) feature columns.
struct PolyTerm {
  int f1 = 0;
  int p1 = 1;
  int f2 = -1;
  int p2 = 0;
};

// Expanded basis for the linear family; LiR and LR use the identity
// expansion (bare degree-1 terms).
std::vector<PolyTerm> poly_expansion(std::size_t num_features, int degree);
Eigen::MatrixXd apply_expansion(const Eigen::MatrixXd& z,
                                const std::vector<PolyTerm>& terms);

struct LinearParams {
  double intercept = 0.0;           // in standardized-feature space
  Eigen::VectorXd weights;          // over expansion terms
  std::vector<PolyTerm> terms;
  bool ridge_fallback = false;
  double ridge_lambda = 0.0;
};

struct TreeNode {
  int feature = -1;        // index into selected columns; -1 for leaves
  double threshold = 0.0;
  double value = 0.0;      // leaf mean (unused on internal nodes)
  int left = -1;
  int right = -1;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double predict(const Eigen::VectorXd& z) const;
};

struct ForestParams {
  std::vector<Tree> trees;
};

// A trained learner. Coefficients (and trees) live in standardized-feature
// space; predict() standardizes incoming raw features with the stored stats.
struct FittedLearner {
  LearnerKind kind = LearnerKind::LiR;
  std::vector<std::string> feature_names;  // full training-set columns
  FeatureMask mask;                        // over feature_names
  NormStats norm;                          // over the selected columns
  std::variant<LinearParams, ForestParams> params;
  LearnerConfig config;
  double train_time_s = 0.0;

  std::vector<std::string> selected_names() const;
  // Original-space (intercept, slopes over selected features); only
  // meaningful for degree-1 linear models.
  std::pair<double, Eigen::VectorXd> original_coefficients() const;
};

// Trains one learner on the masked columns of ds. Standardization happens
// inside: stats are fit on the training rows and stored on the model.
FittedLearner train(const Dataset& ds, const FeatureMask& mask,
                    const LearnerConfig& cfg, std::size_t jobs = 1);

// One prediction per row of `rows`; features are matched by name.
Eigen::VectorXd predict(const FittedLearner& model, const Dataset& rows);

// Solves min ||x*beta - y||^2 by column-pivoted QR; falls back to ridge with
// lambda = 1e-8 * trace(x'x)/p when the design is singular or
// underdetermined. Returns beta; fallback flag/lambda reported via outs.
Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& x,
                                    const Eigen::VectorXd& y,
                                    bool* used_ridge = nullptr,
                                    double* ridge_lambda = nullptr);

// Cyclic coordinate descent for (1/2n)||y - x*beta||^2 + lambda*||beta||_1
// with fixed ascending coordinate order and soft-threshold updates. y must be
// centered by the caller (the intercept is unpenalized and handled outside).
Eigen::VectorXd lasso_coordinate_descent(const Eigen::MatrixXd& x,
                                         const Eigen::VectorXd& y,
                                         double lambda, int max_sweeps,
                                         double tol);

}  // namespace uregm

#endif
