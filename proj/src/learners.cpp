#include "learners.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "parallel.hpp"
#include "rng.hpp"

namespace uregm {

namespace {
constexpr std::size_t kMaxExpandedColumns = 500;
}

const char* to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::LiR: return "LiR";
    case LearnerKind::PR: return "PR";
    case LearnerKind::LR: return "LR";
    case LearnerKind::RF: return "RF";
  }
  return "?";
}

LearnerConfig LearnerConfig::for_kind(LearnerKind k, std::uint64_t seed) {
  LearnerConfig cfg;
  cfg.kind = k;
  cfg.seed = seed;
  return cfg;
}

std::vector<PolyTerm> poly_expansion(std::size_t num_features, int degree) {
  if (degree < 1) throw std::invalid_argument("poly degree must be >= 1");
  std::vector<PolyTerm> terms;
  for (int f = 0; f < static_cast<int>(num_features); ++f) {
    for (int p = 1; p <= degree; ++p) terms.push_back({f, p, -1, 0});
  }
  for (int i = 0; i < static_cast<int>(num_features); ++i) {
    for (int j = i + 1; j < static_cast<int>(num_features); ++j) {
      for (int a = 1; a < degree; ++a) {
        for (int b = 1; a + b <= degree; ++b) terms.push_back({i, a, j, b});
      }
    }
  }
  if (terms.size() > kMaxExpandedColumns) {
    throw std::runtime_error("polynomial expansion exceeds " +
                             std::to_string(kMaxExpandedColumns) + " columns (" +
                             std::to_string(terms.size()) + ")");
  }
  return terms;
}

namespace {
double ipow(double v, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= v;
  return r;
}
}  // namespace

Eigen::MatrixXd apply_expansion(const Eigen::MatrixXd& z,
                                const std::vector<PolyTerm>& terms) {
  Eigen::MatrixXd out(z.rows(), static_cast<Eigen::Index>(terms.size()));
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const auto& term = terms[t];
    const auto col = static_cast<Eigen::Index>(t);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      double v = ipow(z(i, term.f1), term.p1);
      if (term.f2 >= 0) v *= ipow(z(i, term.f2), term.p2);
      out(i, col) = v;
    }
  }
  return out;
}

Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& x,
                                    const Eigen::VectorXd& y, bool* used_ridge,
                                    double* ridge_lambda) {
  if (used_ridge) *used_ridge = false;
  if (ridge_lambda) *ridge_lambda = 0.0;
  if (x.cols() == 0) return Eigen::VectorXd();

  if (x.rows() > x.cols()) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() == x.cols()) return qr.solve(y);
  }
  const double lam =
      1e-8 * x.squaredNorm() / static_cast<double>(x.cols());
  if (used_ridge) *used_ridge = true;
  if (ridge_lambda) *ridge_lambda = lam;
  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += lam;
  return Eigen::LDLT<Eigen::MatrixXd>(gram).solve(x.transpose() * y);
}

Eigen::VectorXd lasso_coordinate_descent(const Eigen::MatrixXd& x,
                                         const Eigen::VectorXd& y,
                                         double lambda, int max_sweeps,
                                         double tol) {
  const auto n = static_cast<double>(x.rows());
  const Eigen::Index p = x.cols();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd norm2(p);
  for (Eigen::Index j = 0; j < p; ++j) norm2[j] = x.col(j).squaredNorm() / n;

  Eigen::VectorXd residual = y;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (norm2[j] == 0.0) continue;
      const double rho = x.col(j).dot(residual) / n + norm2[j] * beta[j];
      const double shrunk = std::abs(rho) - lambda;
      const double updated =
          shrunk > 0.0 ? std::copysign(shrunk, rho) / norm2[j] : 0.0;
      const double change = updated - beta[j];
      if (change != 0.0) {
        residual -= x.col(j) * change;
        beta[j] = updated;
        max_change = std::max(max_change, std::abs(change));
      }
    }
    if (max_change < tol) break;
  }
  return beta;
}

double Tree::predict(const Eigen::VectorXd& z) const {
  int node = 0;
  for (;;) {
    const TreeNode& n = nodes[static_cast<std::size_t>(node)];
    if (n.feature < 0) return n.value;
    node = (z[n.feature] <= n.threshold) ? n.left : n.right;
  }
}

namespace {

// CART regression tree on a bootstrap sample: variance-reduction splits over
// a per-node random feature subset, leaf value = mean target.
class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
              const LearnerConfig& cfg, SplitMix64 rng)
      : z_(z), y_(y), cfg_(cfg), rng_(rng) {
    const auto p = static_cast<std::size_t>(z.cols());
    mtry_ = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(cfg.rf_feature_subsample * static_cast<double>(p))));
    mtry_ = std::min(mtry_, p);
    scratch_features_.resize(p);
    std::iota(scratch_features_.begin(), scratch_features_.end(), 0);
  }

  Tree build() {
    const auto n = static_cast<std::size_t>(z_.rows());
    std::vector<int> sample(n);
    for (auto& s : sample) s = static_cast<int>(rng_.next_below(n));
    Tree tree;
    grow(tree, sample, 0);
    return tree;
  }

 private:
  int grow(Tree& tree, std::vector<int>& idx, int depth) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});

    double sum = 0.0;
    for (int i : idx) sum += y_[i];
    const double mean = sum / static_cast<double>(idx.size());

    if (depth >= cfg_.rf_max_depth ||
        idx.size() < 2 * static_cast<std::size_t>(cfg_.rf_min_leaf)) {
      tree.nodes[static_cast<std::size_t>(node_id)].value = mean;
      return node_id;
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = -std::numeric_limits<double>::infinity();
    const double base_score = sum * sum / static_cast<double>(idx.size());

    // Feature subset without replacement: partial Fisher-Yates on scratch.
    for (std::size_t k = 0; k < mtry_; ++k) {
      const std::size_t pick =
          k + static_cast<std::size_t>(rng_.next_below(scratch_features_.size() - k));
      std::swap(scratch_features_[k], scratch_features_[pick]);
    }

    std::vector<std::pair<double, double>> vals(idx.size());
    for (std::size_t k = 0; k < mtry_; ++k) {
      const int f = scratch_features_[k];
      for (std::size_t i = 0; i < idx.size(); ++i) {
        vals[i] = {z_(idx[i], f), y_[idx[i]]};
      }
      std::sort(vals.begin(), vals.end());

      double left_sum = 0.0;
      const double total = sum;
      for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        left_sum += vals[i].second;
        const auto ln = static_cast<double>(i + 1);
        const auto rn = static_cast<double>(vals.size() - i - 1);
        if (i + 1 < static_cast<std::size_t>(cfg_.rf_min_leaf)) continue;
        if (vals.size() - i - 1 < static_cast<std::size_t>(cfg_.rf_min_leaf)) break;
        if (vals[i].first == vals[i + 1].first) continue;
        const double right_sum = total - left_sum;
        const double score = left_sum * left_sum / ln + right_sum * right_sum / rn;
        if (score > best_score) {
          best_score = score;
          best_feature = f;
          best_threshold = 0.5 * (vals[i].first + vals[i + 1].first);
        }
      }
    }

    if (best_feature < 0 || best_score <= base_score) {
      tree.nodes[static_cast<std::size_t>(node_id)].value = mean;
      return node_id;
    }

    std::vector<int> left_idx, right_idx;
    left_idx.reserve(idx.size());
    right_idx.reserve(idx.size());
    for (int i : idx) {
      (z_(i, best_feature) <= best_threshold ? left_idx : right_idx).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    const int left = grow(tree, left_idx, depth + 1);
    const int right = grow(tree, right_idx, depth + 1);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left;
    node.right = right;
    return node_id;
  }

  const Eigen::MatrixXd& z_;
  const Eigen::VectorXd& y_;
  const LearnerConfig& cfg_;
  SplitMix64 rng_;
  std::size_t mtry_ = 1;
  std::vector<int> scratch_features_;
};

// Fits the linear family on the expanded design. The design columns are
// centered so the intercept stays free of the l1/ridge penalty (expanded
// monomials like z^2 are not mean-zero). Columns whose term touches a
// zero-variance feature are excluded from the solve and get weight 0, so
// flagged columns never force a spurious ridge fallback.
LinearParams fit_linear_family(const Eigen::MatrixXd& z,
                               const Eigen::VectorXd& y, const NormStats& norm,
                               const LearnerConfig& cfg, int degree) {
  LinearParams params;
  params.terms = poly_expansion(static_cast<std::size_t>(z.cols()), degree);

  std::vector<std::size_t> kept;
  for (std::size_t t = 0; t < params.terms.size(); ++t) {
    const auto& term = params.terms[t];
    const bool dead = norm.zero_variance[static_cast<std::size_t>(term.f1)] ||
                      (term.f2 >= 0 &&
                       norm.zero_variance[static_cast<std::size_t>(term.f2)]);
    if (!dead) kept.push_back(t);
  }

  const Eigen::MatrixXd design = apply_expansion(z, params.terms);
  Eigen::MatrixXd design_kept(design.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    design_kept.col(static_cast<Eigen::Index>(i)) =
        design.col(static_cast<Eigen::Index>(kept[i]));
  }
  const Eigen::RowVectorXd column_means = design_kept.colwise().mean();
  design_kept.rowwise() -= column_means;

  const double y_mean = y.mean();
  const Eigen::VectorXd centered = y.array() - y_mean;
  Eigen::VectorXd solved;
  if (cfg.kind == LearnerKind::LR) {
    solved = lasso_coordinate_descent(design_kept, centered, cfg.lasso_lambda,
                                      cfg.lasso_max_sweeps, cfg.lasso_tol);
  } else {
    solved = solve_least_squares(design_kept, centered, &params.ridge_fallback,
                                 &params.ridge_lambda);
  }

  params.intercept = y_mean - (column_means * solved).value();
  params.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params.terms.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    params.weights[static_cast<Eigen::Index>(kept[i])] =
        solved[static_cast<Eigen::Index>(i)];
  }
  return params;
}

}  // namespace

std::vector<std::string> FittedLearner::selected_names() const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    if (mask.test(i)) names.push_back(feature_names[i]);
  }
  return names;
}

std::pair<double, Eigen::VectorXd> FittedLearner::original_coefficients() const {
  const auto* lin = std::get_if<LinearParams>(&params);
  if (!lin) throw std::logic_error("original_coefficients: not a linear model");
  const auto p = static_cast<Eigen::Index>(norm.size());
  Eigen::VectorXd slopes = Eigen::VectorXd::Zero(p);
  double intercept = lin->intercept;
  for (std::size_t t = 0; t < lin->terms.size(); ++t) {
    const auto& term = lin->terms[t];
    if (term.p1 != 1 || term.f2 >= 0) {
      throw std::logic_error("original_coefficients: expansion is not degree 1");
    }
    const auto f = static_cast<std::size_t>(term.f1);
    if (norm.zero_variance[f]) continue;
    const double w = lin->weights[static_cast<Eigen::Index>(t)];
    slopes[term.f1] += w / norm.stds[f];
    intercept -= w * norm.means[f] / norm.stds[f];
  }
  return {intercept, slopes};
}

FittedLearner train(const Dataset& ds, const FeatureMask& mask,
                    const LearnerConfig& cfg, std::size_t jobs) {
  if (mask.size() != ds.num_features()) {
    throw std::invalid_argument("mask length does not match feature count");
  }
  if (!mask.any()) throw std::invalid_argument("all-zero feature mask");
  if (ds.rows() < 2) throw std::invalid_argument("training needs >= 2 rows");
  if (cfg.poly_degree < 1) throw std::invalid_argument("poly_degree must be >= 1");
  if (cfg.lasso_lambda < 0.0) throw std::invalid_argument("lasso_lambda must be >= 0");
  if (cfg.rf_trees < 1) throw std::invalid_argument("rf_trees must be >= 1");
  if (cfg.rf_min_leaf < 1) throw std::invalid_argument("rf_min_leaf must be >= 1");

  const auto selected = mask.selected();
  Eigen::MatrixXd x(ds.features.rows(), static_cast<Eigen::Index>(selected.size()));
  for (std::size_t j = 0; j < selected.size(); ++j) {
    x.col(static_cast<Eigen::Index>(j)) =
        ds.features.col(static_cast<Eigen::Index>(selected[j]));
  }
  if (!x.allFinite()) throw std::invalid_argument("non-finite feature values");
  const Eigen::VectorXd& y = ds.target();
  if (!y.allFinite()) throw std::invalid_argument("non-finite target values");

  FittedLearner model;
  model.kind = cfg.kind;
  model.feature_names = ds.feature_names;
  model.mask = mask;
  model.config = cfg;
  model.norm = NormStats::fit(x);
  const Eigen::MatrixXd z = model.norm.transform(x);

  const auto t0 = std::chrono::steady_clock::now();
  switch (cfg.kind) {
    case LearnerKind::LiR:
      model.params = fit_linear_family(z, y, model.norm, cfg, 1);
      break;
    case LearnerKind::PR:
      model.params = fit_linear_family(z, y, model.norm, cfg, cfg.poly_degree);
      break;
    case LearnerKind::LR:
      model.params = fit_linear_family(z, y, model.norm, cfg, 1);
      break;
    case LearnerKind::RF: {
      ForestParams forest;
      forest.trees.resize(static_cast<std::size_t>(cfg.rf_trees));
      parallel_for(forest.trees.size(), jobs, [&](std::size_t t) {
        TreeBuilder builder(z, y, cfg,
                            derive_stream(cfg.seed, {stream_tag::kTree, t}));
        forest.trees[t] = builder.build();
      });
      model.params = std::move(forest);
      break;
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  model.train_time_s = std::chrono::duration<double>(t1 - t0).count();
  return model;
}

Eigen::VectorXd predict(const FittedLearner& model, const Dataset& rows) {
  const auto selected_names = model.selected_names();
  std::vector<int> cols;
  cols.reserve(selected_names.size());
  for (const auto& name : selected_names) {
    const int idx = rows.feature_index(name);
    if (idx < 0) throw std::runtime_error("missing feature column: " + name);
    cols.push_back(idx);
  }

  Eigen::MatrixXd x(rows.features.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    x.col(static_cast<Eigen::Index>(j)) = rows.features.col(cols[j]);
  }
  const Eigen::MatrixXd z = model.norm.transform(x);

  Eigen::VectorXd preds(z.rows());
  if (const auto* lin = std::get_if<LinearParams>(&model.params)) {
    const Eigen::MatrixXd design = apply_expansion(z, lin->terms);
    preds = (design * lin->weights).array() + lin->intercept;
  } else {
    const auto& forest = std::get<ForestParams>(model.params);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      double sum = 0.0;
      const Eigen::VectorXd row = z.row(i);
      for (const auto& tree : forest.trees) sum += tree.predict(row);
      preds[i] = sum / static_cast<double>(forest.trees.size());
    }
  }
  return preds;
}

}  // namespace uregm
