#include "ensemble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "metrics.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace uregm {

LearnerConfigMap default_learner_configs() {
  LearnerConfigMap cfgs;
  for (int k = 0; k < kNumLearnerKinds; ++k) {
    const auto kind = static_cast<LearnerKind>(k);
    cfgs[kind] = LearnerConfig::for_kind(kind);
  }
  return cfgs;
}

double CombinationResult::rmse_value() const { return std::sqrt(mse_value); }

Eigen::MatrixXd oof_predictions(const Dataset& ds, const FeatureMask& mask,
                                const std::vector<LearnerKind>& kinds,
                                std::size_t folds, std::uint64_t seed,
                                const LearnerConfigMap& cfgs,
                                std::size_t jobs) {
  if (kinds.empty()) throw std::invalid_argument("oof: no learner kinds");
  if (folds < 2) throw std::invalid_argument("oof: folds must be >= 2");
  if (ds.rows() < folds) throw std::invalid_argument("oof: folds exceed rows");

  const auto fold_of = kfold_partition(ds.rows(), folds, seed);

  std::vector<std::vector<std::size_t>> fold_rows(folds);
  std::vector<std::vector<std::size_t>> complement_rows(folds);
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    fold_rows[static_cast<std::size_t>(fold_of[i])].push_back(i);
    for (std::size_t f = 0; f < folds; ++f) {
      if (static_cast<std::size_t>(fold_of[i]) != f) complement_rows[f].push_back(i);
    }
  }

  Eigen::MatrixXd oof(static_cast<Eigen::Index>(ds.rows()),
                      static_cast<Eigen::Index>(kinds.size()));

  // One work unit per (kind, fold); units only touch disjoint slices of oof.
  parallel_for(kinds.size() * folds, jobs, [&](std::size_t unit) {
    const std::size_t k = unit / folds;
    const std::size_t f = unit % folds;
    const LearnerKind kind = kinds[k];
    auto it = cfgs.find(kind);
    if (it == cfgs.end()) throw std::invalid_argument("oof: missing learner config");
    LearnerConfig cfg = it->second;
    cfg.seed = derive_seed(seed, {stream_tag::kOofLearner,
                                  static_cast<std::uint64_t>(kind), f});
    FittedLearner model;
    try {
      model = train(ds.subset(complement_rows[f]), mask, cfg);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("oof: training ") + to_string(kind) +
                               " on fold " + std::to_string(f) + " failed: " +
                               e.what());
    }
    const Eigen::VectorXd preds = predict(model, ds.subset(fold_rows[f]));
    for (std::size_t i = 0; i < fold_rows[f].size(); ++i) {
      oof(static_cast<Eigen::Index>(fold_rows[f][i]),
          static_cast<Eigen::Index>(k)) = preds[static_cast<Eigen::Index>(i)];
    }
  });
  return oof;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  int support = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumulative += u[static_cast<std::size_t>(i)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[static_cast<std::size_t>(i)] - candidate > 0.0) {
      theta = candidate;
      support = static_cast<int>(i + 1);
    }
  }
  (void)support;
  return (v.array() - theta).max(0.0);
}

Eigen::VectorXd fit_weights(const Eigen::MatrixXd& oof,
                            const Eigen::VectorXd& targets) {
  if (oof.cols() < 1) throw std::invalid_argument("fit_weights: no columns");
  if (oof.rows() != targets.size()) {
    throw std::invalid_argument("fit_weights: row count mismatch");
  }
  if (!oof.allFinite() || !targets.allFinite()) {
    throw std::invalid_argument("fit_weights: non-finite inputs");
  }
  const Eigen::Index k = oof.cols();
  if (k == 1) return Eigen::VectorXd::Ones(1);

  // trace(A'A) bounds the largest squared singular value; gradient of
  // ||Aw - y||^2 is 2A'(Aw - y), so 1/(2*trace) is a safe step.
  const Eigen::MatrixXd gram = oof.transpose() * oof;
  const Eigen::VectorXd aty = oof.transpose() * targets;
  const double lipschitz = 2.0 * gram.trace();
  const double step = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;

  Eigen::VectorXd w = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
  for (int iter = 0; iter < 10000; ++iter) {
    const Eigen::VectorXd grad = 2.0 * (gram * w - aty);
    const Eigen::VectorXd next = project_to_simplex(w - step * grad);
    const double move = (next - w).norm();
    w = next;
    if (move < 1e-10) break;
  }
  return w;
}

namespace {

Eigen::VectorXd blend(const Eigen::MatrixXd& oof,
                      const std::vector<int>& member_cols,
                      const Eigen::VectorXd& weights, double intercept) {
  Eigen::VectorXd out = Eigen::VectorXd::Constant(oof.rows(), intercept);
  for (std::size_t i = 0; i < member_cols.size(); ++i) {
    out += weights[static_cast<Eigen::Index>(i)] * oof.col(member_cols[i]);
  }
  return out;
}

std::vector<std::vector<int>> enumerate_subsets(int n) {
  std::vector<std::vector<int>> subsets;
  for (int count = 1; count <= n; ++count) {
    std::vector<int> pick(static_cast<std::size_t>(count));
    std::iota(pick.begin(), pick.end(), 0);
    for (;;) {
      subsets.push_back(pick);
      int i = count - 1;
      while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - count + i) --i;
      if (i < 0) break;
      ++pick[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < count; ++j) {
        pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
  }
  return subsets;
}

const std::vector<LearnerKind>& all_kinds() {
  static const std::vector<LearnerKind> kinds = {
      LearnerKind::LiR, LearnerKind::PR, LearnerKind::LR, LearnerKind::RF};
  return kinds;
}

void refit_members(UregmModel& model, const Dataset& ds,
                   const LearnerConfigMap& cfgs, std::uint64_t seed,
                   std::size_t jobs) {
  for (LearnerKind kind : model.best.combination.members) {
    LearnerConfig cfg = cfgs.at(kind);
    cfg.seed = derive_seed(seed, {stream_tag::kRefit,
                                  static_cast<std::uint64_t>(kind)});
    model.fitted_members[kind] = train(ds, model.mask, cfg, jobs);
  }
  model.norm = model.fitted_members.begin()->second.norm;
}

}  // namespace

UregmModel uregm_search(const Dataset& ds, const FeatureMask& mask,
                        const LearnerConfigMap& cfgs, std::size_t folds,
                        std::uint64_t seed, std::size_t jobs) {
  const auto& kinds = all_kinds();
  const Eigen::MatrixXd oof =
      oof_predictions(ds, mask, kinds, folds, seed, cfgs, jobs);
  const Eigen::VectorXd& y = ds.target();

  const auto subsets = enumerate_subsets(static_cast<int>(kinds.size()));
  std::vector<CombinationResult> log(subsets.size());

  parallel_for(subsets.size(), jobs, [&](std::size_t s) {
    const auto& cols = subsets[s];
    const auto t0 = std::chrono::steady_clock::now();
    Eigen::MatrixXd sub(oof.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) {
      sub.col(static_cast<Eigen::Index>(i)) = oof.col(cols[i]);
    }
    CombinationResult r;
    for (int c : cols) r.combination.members.push_back(kinds[static_cast<std::size_t>(c)]);
    r.combination.weights = fit_weights(sub, y);
    const Eigen::VectorXd blended = blend(oof, cols, r.combination.weights, 0.0);
    r.score = accuracy(blended, y, &r.accuracy_excluded);
    r.mse_value = mse(blended, y);
    const auto t1 = std::chrono::steady_clock::now();
    r.fit_time_s = std::chrono::duration<double>(t1 - t0).count();
    log[s] = std::move(r);
  });

  // Best under strict improvement in enumeration order: ties resolve to the
  // earlier entry, i.e. fewer members, then lexicographic member order.
  std::size_t best = 0;
  for (std::size_t s = 1; s < log.size(); ++s) {
    if (log[s].score > log[best].score) best = s;
  }

  UregmModel model;
  model.label = "uregm";
  model.best = log[best];
  model.feature_names = ds.feature_names;
  model.mask = mask;
  model.search_log = std::move(log);
  refit_members(model, ds, cfgs, seed, jobs);
  return model;
}

UregmModel reap_baseline(const Dataset& ds, const FeatureMask& mask,
                         const LearnerConfigMap& cfgs, std::size_t folds,
                         std::uint64_t seed, std::size_t jobs) {
  const auto& kinds = all_kinds();
  const Eigen::MatrixXd oof =
      oof_predictions(ds, mask, kinds, folds, seed, cfgs, jobs);
  const Eigen::VectorXd& y = ds.target();

  const auto t0 = std::chrono::steady_clock::now();
  Eigen::MatrixXd design(oof.rows(), oof.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(oof.cols()) = oof;
  const Eigen::VectorXd theta = solve_least_squares(design, y);

  CombinationResult r;
  r.combination.members = kinds;
  r.combination.intercept = theta[0];
  r.combination.weights = theta.tail(oof.cols());
  std::vector<int> cols(kinds.size());
  std::iota(cols.begin(), cols.end(), 0);
  const Eigen::VectorXd blended =
      blend(oof, cols, r.combination.weights, r.combination.intercept);
  r.score = accuracy(blended, y, &r.accuracy_excluded);
  r.mse_value = mse(blended, y);
  const auto t1 = std::chrono::steady_clock::now();
  r.fit_time_s = std::chrono::duration<double>(t1 - t0).count();

  UregmModel model;
  model.label = "reap";
  model.best = r;
  model.feature_names = ds.feature_names;
  model.mask = mask;
  model.search_log = {std::move(r)};
  refit_members(model, ds, cfgs, seed, jobs);
  return model;
}

Eigen::VectorXd uregm_predict(const UregmModel& model, const Dataset& rows) {
  const auto& combo = model.best.combination;
  Eigen::VectorXd out = Eigen::VectorXd::Constant(
      static_cast<Eigen::Index>(rows.rows()), combo.intercept);
  for (std::size_t i = 0; i < combo.members.size(); ++i) {
    const auto it = model.fitted_members.find(combo.members[i]);
    if (it == model.fitted_members.end()) {
      throw std::logic_error("uregm_predict: member not fitted");
    }
    out += combo.weights[static_cast<Eigen::Index>(i)] * predict(it->second, rows);
  }
  return out;
}

}  // namespace uregm
