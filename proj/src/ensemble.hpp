#ifndef UREGM_ENSEMBLE_HPP
#define UREGM_ENSEMBLE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

#include "dataset.hpp"
#include "learners.hpp"

namespace uregm {

using LearnerConfigMap = std::map<LearnerKind, LearnerConfig>;

LearnerConfigMap default_learner_configs();

// Out-of-fold predictions: column k holds, for every row, the prediction made
// by kinds[k] trained on that row's fold complement. Fold assignment and the
// per-(kind, fold) training streams are derived from `seed` only, so a kind's
// column is identical no matter which other kinds are requested.
Eigen::MatrixXd oof_predictions(const Dataset& ds, const FeatureMask& mask,
                                const std::vector<LearnerKind>& kinds,
                                std::size_t folds, std::uint64_t seed,
                                const LearnerConfigMap& cfgs,
                                std::size_t jobs = 1);

// Least squares over the probability simplex: min ||oof*w - y||^2 subject to
// w >= 0, sum(w) = 1. Projected gradient with step 1/L, L = 2*trace(A'A).
Eigen::VectorXd fit_weights(const Eigen::MatrixXd& oof,
                            const Eigen::VectorXd& targets);

// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

struct Combination {
  std::vector<LearnerKind> members;  // sorted in LearnerKind order
  Eigen::VectorXd weights;           // one per member
  double intercept = 0.0;            // 0 for simplex blends; free for reap
};

struct CombinationResult {
  Combination combination;
  double score = 0.0;      // MSc: accuracy of the blended out-of-fold predictions
  double mse_value = 0.0;  // of the same blended vector
  std::size_t accuracy_excluded = 0;
  double fit_time_s = 0.0;

  double rmse_value() const;
};

// Either the unified subset-search model or the fixed all-member stacking
// baseline, depending on how it was built.
struct UregmModel {
  std::string label;  // "uregm" or "reap"
  CombinationResult best;
  std::map<LearnerKind, FittedLearner> fitted_members;  // refit on all rows
  std::vector<std::string> feature_names;
  FeatureMask mask;
  NormStats norm;  // stats of the refit members' selected columns
  std::vector<CombinationResult> search_log;
};

// Enumerates all non-empty subsets of {LiR, PR, LR, RF} ordered by member
// count then lexicographically; scores each by the accuracy of its
// simplex-blended out-of-fold predictions; keeps the best under strict
// improvement (so ties resolve to fewer members, then lexicographic order);
// refits the winning members on the full dataset.
UregmModel uregm_search(const Dataset& ds, const FeatureMask& mask,
                        const LearnerConfigMap& cfgs, std::size_t folds,
                        std::uint64_t seed, std::size_t jobs = 1);

// Fixed {LiR, PR, LR, RF} stack combined by unconstrained least squares with
// an intercept; no subset search. Reported as "REAP-analogue".
UregmModel reap_baseline(const Dataset& ds, const FeatureMask& mask,
                         const LearnerConfigMap& cfgs, std::size_t folds,
                         std::uint64_t seed, std::size_t jobs = 1);

Eigen::VectorXd uregm_predict(const UregmModel& model, const Dataset& rows);

}  // namespace uregm

#endif
