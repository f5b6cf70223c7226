#include "serialize.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace uregm {

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

namespace {

json mask_to_json(const FeatureMask& mask) {
  json bits = json::array();
  for (auto b : mask.bits) bits.push_back(b ? 1 : 0);
  return bits;
}

FeatureMask mask_from_json(const json& j) {
  FeatureMask mask;
  for (const auto& b : j) mask.bits.push_back(b.get<int>() ? 1 : 0);
  return mask;
}

json norm_to_json(const NormStats& norm) {
  json flags = json::array();
  for (bool f : norm.zero_variance) flags.push_back(f ? 1 : 0);
  return json{{"means", norm.means}, {"stds", norm.stds}, {"flags", flags}};
}

NormStats norm_from_json(const json& j) {
  NormStats norm;
  norm.means = j.at("means").get<std::vector<double>>();
  norm.stds = j.at("stds").get<std::vector<double>>();
  for (const auto& f : j.at("flags")) norm.zero_variance.push_back(f.get<int>() != 0);
  return norm;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& x : j) v[i++] = x.get<double>();
  return v;
}

LearnerKind kind_from_string(const std::string& s) {
  for (int k = 0; k < kNumLearnerKinds; ++k) {
    const auto kind = static_cast<LearnerKind>(k);
    if (s == to_string(kind)) return kind;
  }
  throw std::runtime_error("unknown learner kind: " + s);
}

json config_to_json(const LearnerConfig& cfg) {
  return json{{"poly_degree", cfg.poly_degree},
              {"lasso_lambda", cfg.lasso_lambda},
              {"lasso_max_sweeps", cfg.lasso_max_sweeps},
              {"lasso_tol", cfg.lasso_tol},
              {"rf_trees", cfg.rf_trees},
              {"rf_max_depth", cfg.rf_max_depth},
              {"rf_min_leaf", cfg.rf_min_leaf},
              {"rf_feature_subsample", cfg.rf_feature_subsample},
              {"seed", cfg.seed}};
}

LearnerConfig config_from_json(const json& j, LearnerKind kind) {
  LearnerConfig cfg;
  cfg.kind = kind;
  cfg.poly_degree = j.at("poly_degree").get<int>();
  cfg.lasso_lambda = j.at("lasso_lambda").get<double>();
  cfg.lasso_max_sweeps = j.at("lasso_max_sweeps").get<int>();
  cfg.lasso_tol = j.at("lasso_tol").get<double>();
  cfg.rf_trees = j.at("rf_trees").get<int>();
  cfg.rf_max_depth = j.at("rf_max_depth").get<int>();
  cfg.rf_min_leaf = j.at("rf_min_leaf").get<int>();
  cfg.rf_feature_subsample = j.at("rf_feature_subsample").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

json combination_to_json(const CombinationResult& r) {
  json members = json::array();
  for (auto k : r.combination.members) members.push_back(to_string(k));
  return json{{"members", members},
              {"weights", vector_to_json(r.combination.weights)},
              {"intercept", r.combination.intercept},
              {"score", r.score},
              {"mse", r.mse_value},
              {"rmse", r.rmse_value()},
              {"accuracy_excluded", r.accuracy_excluded},
              {"fit_time_s", 0.0}};
}

CombinationResult combination_from_json(const json& j) {
  CombinationResult r;
  for (const auto& m : j.at("members")) {
    r.combination.members.push_back(kind_from_string(m.get<std::string>()));
  }
  r.combination.weights = vector_from_json(j.at("weights"));
  r.combination.intercept = j.at("intercept").get<double>();
  r.score = j.at("score").get<double>();
  r.mse_value = j.at("mse").get<double>();
  r.accuracy_excluded = j.at("accuracy_excluded").get<std::size_t>();
  return r;
}

}  // namespace

json ga_result_to_json(const GaResult& result) {
  json history = json::array();
  for (const auto& g : result.history) {
    history.push_back({{"gen", g.generation}, {"best", g.best}, {"mean", g.mean}});
  }
  return json{{"best_mask", mask_to_json(result.best_mask)},
              {"best_fitness", result.best_fitness},
              {"history", history},
              {"expectation_scores", result.expectation_scores},
              {"format_version", 1}};
}

GaResult ga_result_from_json(const json& j) {
  GaResult result;
  result.best_mask = mask_from_json(j.at("best_mask"));
  result.best_fitness = j.at("best_fitness").get<double>();
  for (const auto& g : j.at("history")) {
    result.history.push_back({g.at("gen").get<std::size_t>(),
                              g.at("best").get<double>(),
                              g.at("mean").get<double>()});
  }
  result.expectation_scores =
      j.at("expectation_scores").get<std::vector<double>>();
  return result;
}

json learner_to_json(const FittedLearner& model) {
  json parameters;
  if (const auto* lin = std::get_if<LinearParams>(&model.params)) {
    json terms = json::array();
    for (const auto& t : lin->terms) {
      terms.push_back({t.f1, t.p1, t.f2, t.p2});
    }
    parameters = json{{"intercept", lin->intercept},
                      {"coefficients", vector_to_json(lin->weights)},
                      {"terms", terms},
                      {"ridge_fallback", lin->ridge_fallback},
                      {"ridge_lambda", lin->ridge_lambda}};
  } else {
    const auto& forest = std::get<ForestParams>(model.params);
    json trees = json::array();
    for (const auto& tree : forest.trees) {
      json nodes = json::array();
      for (const auto& n : tree.nodes) {
        nodes.push_back({n.feature, n.threshold, n.value, n.left, n.right});
      }
      trees.push_back(std::move(nodes));
    }
    parameters = json{{"trees", std::move(trees)}};
  }
  return json{{"kind", to_string(model.kind)},
              {"feature_names", model.feature_names},
              {"mask", mask_to_json(model.mask)},
              {"norm", norm_to_json(model.norm)},
              {"parameters", std::move(parameters)},
              {"config", config_to_json(model.config)},
              {"train_time_s", 0.0},
              {"format_version", 1}};
}

FittedLearner learner_from_json(const json& j) {
  FittedLearner model;
  model.kind = kind_from_string(j.at("kind").get<std::string>());
  model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  model.mask = mask_from_json(j.at("mask"));
  model.norm = norm_from_json(j.at("norm"));
  model.config = config_from_json(j.at("config"), model.kind);
  const auto& parameters = j.at("parameters");
  if (parameters.contains("trees")) {
    ForestParams forest;
    for (const auto& tree_json : parameters.at("trees")) {
      Tree tree;
      for (const auto& n : tree_json) {
        tree.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(),
                              n.at(2).get<double>(), n.at(3).get<int>(),
                              n.at(4).get<int>()});
      }
      forest.trees.push_back(std::move(tree));
    }
    model.params = std::move(forest);
  } else {
    LinearParams lin;
    lin.intercept = parameters.at("intercept").get<double>();
    lin.weights = vector_from_json(parameters.at("coefficients"));
    for (const auto& t : parameters.at("terms")) {
      lin.terms.push_back({t.at(0).get<int>(), t.at(1).get<int>(),
                           t.at(2).get<int>(), t.at(3).get<int>()});
    }
    lin.ridge_fallback = parameters.at("ridge_fallback").get<bool>();
    lin.ridge_lambda = parameters.at("ridge_lambda").get<double>();
    model.params = std::move(lin);
  }
  return model;
}

json uregm_model_to_json(const UregmModel& model) {
  json members;
  for (const auto& [kind, learner] : model.fitted_members) {
    members[to_string(kind)] = learner_to_json(learner);
  }
  json log = json::array();
  for (const auto& r : model.search_log) log.push_back(combination_to_json(r));
  return json{{"kind", model.label},
              {"best", combination_to_json(model.best)},
              {"fitted_members", std::move(members)},
              {"feature_names", model.feature_names},
              {"mask", mask_to_json(model.mask)},
              {"norm", norm_to_json(model.norm)},
              {"search_log", std::move(log)},
              {"format_version", 1}};
}

UregmModel uregm_model_from_json(const json& j) {
  UregmModel model;
  model.label = j.at("kind").get<std::string>();
  model.best = combination_from_json(j.at("best"));
  for (const auto& [name, learner_json] : j.at("fitted_members").items()) {
    model.fitted_members[kind_from_string(name)] = learner_from_json(learner_json);
  }
  model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  model.mask = mask_from_json(j.at("mask"));
  model.norm = norm_from_json(j.at("norm"));
  for (const auto& r : j.at("search_log")) {
    model.search_log.push_back(combination_from_json(r));
  }
  return model;
}

json report_to_json(const EvaluationReport& report) {
  json models;
  for (const auto& [label, m] : report.models) {
    models[to_string(label)] = {{"mse", m.mse_value},
                                {"rmse", m.rmse_value()},
                                {"accuracy", m.accuracy_value},
                                {"accuracy_excluded", m.accuracy_excluded},
                                {"time_s", 0.0}};
  }
  return json{{"models", std::move(models)},
              {"folds", report.folds},
              {"seed", report.seed},
              {"dataset", {{"rows", report.dataset_rows},
                           {"features", report.dataset_features}}},
              {"accuracy_definition", report.accuracy_definition},
              {"format_version", 1}};
}

json model_to_json(const AnyModel& model) {
  if (const auto* learner = std::get_if<FittedLearner>(&model)) {
    return learner_to_json(*learner);
  }
  return uregm_model_to_json(std::get<UregmModel>(model));
}

AnyModel model_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "uregm" || kind == "reap") return uregm_model_from_json(j);
  return learner_from_json(j);
}

void save_model(const AnyModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << model_to_json(model).dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

AnyModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("invalid model JSON in " + path + ": " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const json::exception& e) {
    throw std::runtime_error("invalid model schema in " + path + ": " + e.what());
  }
}

Eigen::VectorXd predict_any(const AnyModel& model, const Dataset& rows) {
  if (const auto* learner = std::get_if<FittedLearner>(&model)) {
    return predict(*learner, rows);
  }
  return uregm_predict(std::get<UregmModel>(model), rows);
}

}  // namespace uregm
