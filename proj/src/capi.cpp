#include "uregm/uregm.h"

#include <cstring>
#include <new>
#include <string>

#include "dataset.hpp"
#include "ensemble.hpp"
#include "evaluation.hpp"
#include "ga.hpp"
#include "learners.hpp"
#include "serialize.hpp"
#include "simulator.hpp"

extern "C" {

struct uregm_dataset {
  uregm::Dataset rep;
};
struct uregm_ga_result {
  uregm::GaResult rep;
};
struct uregm_model {
  uregm::AnyModel rep;
};
struct uregm_report {
  uregm::EvaluationReport rep;
};

}  // extern "C"

namespace {

thread_local std::string tl_last_error;

void set_error(const std::string& msg) { tl_last_error = msg; }

// Runs the body, translating exceptions into error codes.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return UREGM_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    set_error(e.what());
    return UREGM_ERR_RUNTIME;
  } catch (...) {
    set_error("unknown internal error");
    return UREGM_ERR_INTERNAL;
  }
}

int require(const void* ptr, const char* name) {
  if (ptr) return UREGM_OK;
  set_error(std::string("null pointer: ") + name);
  return UREGM_ERR_NULL_POINTER;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(::operator new(s.size() + 1, std::nothrow));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int return_string(const std::string& s, char** out) {
  *out = copy_string(s);
  if (!*out) {
    set_error("allocation failure");
    return UREGM_ERR_INTERNAL;
  }
  return UREGM_OK;
}

uregm::TargetKind target_from_int(int target) {
  switch (target) {
    case UREGM_TARGET_CPU: return uregm::TargetKind::Cpu;
    case UREGM_TARGET_MEM: return uregm::TargetKind::Memory;
    case UREGM_TARGET_NONE: return uregm::TargetKind::None;
    default: throw std::invalid_argument("unknown target kind");
  }
}

uregm::FeatureMask mask_from_bits(const uint8_t* bits, size_t len,
                                  size_t num_features) {
  if (!bits) return uregm::FeatureMask::all(num_features);
  if (len != num_features) {
    throw std::invalid_argument("mask length does not match feature count");
  }
  uregm::FeatureMask mask;
  mask.bits.assign(bits, bits + len);
  for (auto& b : mask.bits) b = b ? 1 : 0;
  return mask;
}

uregm::LearnerConfigMap configs_from_params(const uregm_train_params& p) {
  auto cfgs = uregm::default_learner_configs();
  for (auto& [kind, cfg] : cfgs) {
    cfg.poly_degree = p.poly_degree;
    cfg.lasso_lambda = p.lasso_lambda;
    cfg.lasso_max_sweeps = p.lasso_max_sweeps;
    cfg.lasso_tol = p.lasso_tol;
    cfg.rf_trees = p.rf_trees;
    cfg.rf_max_depth = p.rf_max_depth;
    cfg.rf_min_leaf = p.rf_min_leaf;
    cfg.rf_feature_subsample = p.rf_feature_subsample;
    cfg.seed = p.seed;
  }
  return cfgs;
}

}  // namespace

extern "C" {

const char* uregm_version(void) { return UREGM_VERSION_STRING; }

const char* uregm_last_error(void) { return tl_last_error.c_str(); }

void uregm_string_free(char* s) { ::operator delete(s); }

/* ---- datasets ------------------------------------------------------- */

int uregm_dataset_load_csv(const char* path, int target, size_t* rows_dropped,
                           uregm_dataset** out) {
  if (int rc = require(path, "path")) return rc;
  if (int rc = require(out, "out")) return rc;
  return guarded([&] {
    uregm::LoadSummary summary;
    auto ds = uregm::load_csv(path, target_from_int(target), &summary);
    if (rows_dropped) *rows_dropped = summary.rows_dropped;
    *out = new uregm_dataset{std::move(ds)};
    return UREGM_OK;
  });
}

int uregm_dataset_generate(size_t rows, double noise_sigma, uint64_t seed,
                           int target, const double* smell_mix,
                           uregm_dataset** out) {
  if (int rc = require(out, "out")) return rc;
  return guarded([&] {
    uregm::GenConfig cfg;
    cfg.rows = rows;
    cfg.noise_sigma = noise_sigma;
    cfg.seed = seed;
    cfg.target_kind = target_from_int(target);
    if (smell_mix) {
      for (int i = 0; i < uregm::kNumSmellTypes; ++i) cfg.smell_mix[i] = smell_mix[i];
    }
    *out = new uregm_dataset{uregm::generate(cfg)};
    return UREGM_OK;
  });
}

int uregm_dataset_save_csv(const uregm_dataset* ds, const char* path) {
  if (int rc = require(ds, "ds")) return rc;
  if (int rc = require(path, "path")) return rc;
  return guarded([&] {
    uregm::write_csv(ds->rep, path);
    return UREGM_OK;
  });
}

int uregm_dataset_to_csv(const uregm_dataset* ds, char** out_csv) {
  if (int rc = require(ds, "ds")) return rc;
  if (int rc = require(out_csv, "out_csv")) return rc;
  return guarded([&] { return return_string(uregm::to_csv(ds->rep), out_csv); });
}

int uregm_dataset_rows(const uregm_dataset* ds, size_t* out) {
  if (int rc = require(ds, "ds")) return rc;
  if (int rc = require(out, "out")) return rc;
  *out = ds->rep.rows();
  return UREGM_OK;
}

int uregm_dataset_num_features(const uregm_dataset* ds, size_t* out) {
  if (int rc = require(ds, "ds")) return rc;
  if (int rc = require(out, "out")) return rc;
  *out = ds->rep.num_features();
  return UREGM_OK;
}

int uregm_dataset_feature_name(const uregm_dataset* ds, size_t index,
                               const char** out) {
  if (int rc = require(ds, "ds")) return rc;
  if (int rc = require(out, "out")) return rc;
  if (index >= ds->rep.num_features()) {
    set_error("feature index out of range");
    return UREGM_ERR_INVALID_ARGUMENT;
  }
  *out = ds->rep.feature_names[index].c_str();
  return UREGM_OK;
}

int uregm_dataset_sample_id(const uregm_dataset* ds, size_t index,
                            const char** out) {
  if (int rc = require(ds, "ds")) return rc;
  if (int rc = require(out, "out")) return rc;
  if (index >= ds->rep.rows()) {
    set_error("row index out of range");
    return UREGM_ERR_INVALID_ARGUMENT;
  }
  *out = ds->rep.sample_ids[index].c_str();
  return UREGM_OK;
}

int uregm_dataset_split(const uregm_dataset* ds, double train_fraction,
                        uint64_t seed, uregm_dataset** out_train,
                        uregm_dataset** out_test) {
  if (int rc = require(ds, "ds")) return rc;
  if (int rc = require(out_train, "out_train")) return rc;
  if (int rc = require(out_test, "out_test")) return rc;
  return guarded([&] {
    auto [train_ds, test_ds] = uregm::split(ds->rep, {train_fraction, seed});
    *out_train = new uregm_dataset{std::move(train_ds)};
    *out_test = new uregm_dataset{std::move(test_ds)};
    return UREGM_OK;
  });
}

void uregm_dataset_free(uregm_dataset* ds) { delete ds; }

/* ---- feature selection ----------------------------------------------- */

void uregm_ga_params_init(uregm_ga_params* params) {
  if (!params) return;
  params->population_size = 30;
  params->generations = 50;
  params->crossover_rate = 0.8;
  params->mutation_rate = -1.0;
  params->elitism = 2;
  params->seed = 0;
  params->fitness_folds = 5;
  params->jobs = 1;
}

int uregm_select_features(const uregm_dataset* ds,
                          const uregm_ga_params* params,
                          uregm_ga_result** out) {
  if (int rc = require(ds, "ds")) return rc;
  if (int rc = require(out, "out")) return rc;
  return guarded([&] {
    uregm_ga_params defaults;
    uregm_ga_params_init(&defaults);
    const uregm_ga_params& p = params ? *params : defaults;
    uregm::GaConfig cfg;
    cfg.population_size = p.population_size;
    cfg.generations = p.generations;
    cfg.crossover_rate = p.crossover_rate;
    cfg.mutation_rate = p.mutation_rate;
    cfg.elitism = p.elitism;
    cfg.seed = p.seed;
    cfg.fitness_folds = p.fitness_folds;
    *out = new uregm_ga_result{uregm::evolve(ds->rep, cfg, p.jobs)};
    return UREGM_OK;
  });
}

int uregm_ga_result_mask_len(const uregm_ga_result* result, size_t* out) {
  if (int rc = require(result, "result")) return rc;
  if (int rc = require(out, "out")) return rc;
  *out = result->rep.best_mask.size();
  return UREGM_OK;
}

int uregm_ga_result_mask(const uregm_ga_result* result, uint8_t* bits,
                         size_t len) {
  if (int rc = require(result, "result")) return rc;
  if (int rc = require(bits, "bits")) return rc;
  if (len != result->rep.best_mask.size()) {
    set_error("mask buffer length mismatch");
    return UREGM_ERR_INVALID_ARGUMENT;
  }
  for (size_t i = 0; i < len; ++i) bits[i] = result->rep.best_mask.bits[i];
  return UREGM_OK;
}

int uregm_ga_result_best_fitness(const uregm_ga_result* result, double* out) {
  if (int rc = require(result, "result")) return rc;
  if (int rc = require(out, "out")) return rc;
  *out = result->rep.best_fitness;
  return UREGM_OK;
}

int uregm_ga_result_to_json(const uregm_ga_result* result, char** out_json) {
  if (int rc = require(result, "result")) return rc;
  if (int rc = require(out_json, "out_json")) return rc;
  return guarded([&] {
    return return_string(uregm::ga_result_to_json(result->rep).dump(2) + "\n",
                         out_json);
  });
}

void uregm_ga_result_free(uregm_ga_result* result) { delete result; }

/* ---- training --------------------------------------------------------- */

void uregm_train_params_init(uregm_train_params* params) {
  if (!params) return;
  const uregm::LearnerConfig defaults;
  params->poly_degree = defaults.poly_degree;
  params->lasso_lambda = defaults.lasso_lambda;
  params->lasso_max_sweeps = defaults.lasso_max_sweeps;
  params->lasso_tol = defaults.lasso_tol;
  params->rf_trees = defaults.rf_trees;
  params->rf_max_depth = defaults.rf_max_depth;
  params->rf_min_leaf = defaults.rf_min_leaf;
  params->rf_feature_subsample = defaults.rf_feature_subsample;
  params->folds = 5;
  params->seed = 0;
  params->jobs = 1;
}

int uregm_train(const uregm_dataset* ds, const uint8_t* mask_bits,
                size_t mask_len, int model_kind,
                const uregm_train_params* params, uregm_model** out) {
  if (int rc = require(ds, "ds")) return rc;
  if (int rc = require(out, "out")) return rc;
  return guarded([&] {
    uregm_train_params defaults;
    uregm_train_params_init(&defaults);
    const uregm_train_params& p = params ? *params : defaults;
    const auto mask = mask_from_bits(mask_bits, mask_len, ds->rep.num_features());
    const auto cfgs = configs_from_params(p);

    switch (model_kind) {
      case UREGM_MODEL_LIR:
      case UREGM_MODEL_PR:
      case UREGM_MODEL_LR:
      case UREGM_MODEL_RF: {
        auto cfg = cfgs.at(static_cast<uregm::LearnerKind>(model_kind));
        *out = new uregm_model{uregm::train(ds->rep, mask, cfg, p.jobs)};
        return UREGM_OK;
      }
      case UREGM_MODEL_UREGM:
        *out = new uregm_model{
            uregm::uregm_search(ds->rep, mask, cfgs, p.folds, p.seed, p.jobs)};
        return UREGM_OK;
      case UREGM_MODEL_REAP:
        *out = new uregm_model{
            uregm::reap_baseline(ds->rep, mask, cfgs, p.folds, p.seed, p.jobs)};
        return UREGM_OK;
      default:
        throw std::invalid_argument("unknown model kind");
    }
  });
}

int uregm_model_to_json(const uregm_model* model, char** out_json) {
  if (int rc = require(model, "model")) return rc;
  if (int rc = require(out_json, "out_json")) return rc;
  return guarded([&] {
    return return_string(uregm::model_to_json(model->rep).dump(2) + "\n",
                         out_json);
  });
}

int uregm_model_from_json(const char* json_text, uregm_model** out) {
  if (int rc = require(json_text, "json_text")) return rc;
  if (int rc = require(out, "out")) return rc;
  return guarded([&] {
    const auto j = uregm::json::parse(json_text);
    *out = new uregm_model{uregm::model_from_json(j)};
    return UREGM_OK;
  });
}

int uregm_model_save(const uregm_model* model, const char* path) {
  if (int rc = require(model, "model")) return rc;
  if (int rc = require(path, "path")) return rc;
  return guarded([&] {
    uregm::save_model(model->rep, path);
    return UREGM_OK;
  });
}

int uregm_model_load(const char* path, uregm_model** out) {
  if (int rc = require(path, "path")) return rc;
  if (int rc = require(out, "out")) return rc;
  return guarded([&] {
    *out = new uregm_model{uregm::load_model(path)};
    return UREGM_OK;
  });
}

int uregm_model_predict(const uregm_model* model, const uregm_dataset* ds,
                        double* out_predictions, size_t len) {
  if (int rc = require(model, "model")) return rc;
  if (int rc = require(ds, "ds")) return rc;
  if (int rc = require(out_predictions, "out_predictions")) return rc;
  return guarded([&] {
    if (len != ds->rep.rows()) {
      throw std::invalid_argument("prediction buffer length mismatch");
    }
    const Eigen::VectorXd preds = uregm::predict_any(model->rep, ds->rep);
    for (Eigen::Index i = 0; i < preds.size(); ++i) {
      out_predictions[i] = preds[i];
    }
    return UREGM_OK;
  });
}

void uregm_model_free(uregm_model* model) { delete model; }

/* ---- evaluation -------------------------------------------------------- */

int uregm_evaluate(const uregm_dataset* ds, const int* model_kinds,
                   size_t num_models, size_t folds, uint64_t seed, size_t jobs,
                   const uregm_train_params* params, uregm_report** out) {
  if (int rc = require(ds, "ds")) return rc;
  if (int rc = require(model_kinds, "model_kinds")) return rc;
  if (int rc = require(out, "out")) return rc;
  return guarded([&] {
    uregm_train_params defaults;
    uregm_train_params_init(&defaults);
    uregm_train_params p = params ? *params : defaults;
    p.seed = seed;
    std::vector<uregm::ModelLabel> labels;
    for (size_t i = 0; i < num_models; ++i) {
      if (model_kinds[i] < 0 || model_kinds[i] > UREGM_MODEL_UREGM) {
        throw std::invalid_argument("unknown model kind in evaluate");
      }
      labels.push_back(static_cast<uregm::ModelLabel>(model_kinds[i]));
    }
    const auto mask = uregm::FeatureMask::all(ds->rep.num_features());
    *out = new uregm_report{uregm::kfold_evaluate(
        ds->rep, mask, labels, folds, seed, configs_from_params(p), jobs)};
    return UREGM_OK;
  });
}

int uregm_report_render(const uregm_report* report, int format,
                        char** out_text) {
  if (int rc = require(report, "report")) return rc;
  if (int rc = require(out_text, "out_text")) return rc;
  return guarded([&] {
    if (format < UREGM_FORMAT_TEXT || format > UREGM_FORMAT_CSV) {
      throw std::invalid_argument("unknown report format");
    }
    return return_string(
        uregm::render_report(report->rep,
                             static_cast<uregm::ReportFormat>(format)),
        out_text);
  });
}

int uregm_report_metric(const uregm_report* report, int model_kind,
                        const char* metric, double* out) {
  if (int rc = require(report, "report")) return rc;
  if (int rc = require(metric, "metric")) return rc;
  if (int rc = require(out, "out")) return rc;
  return guarded([&] {
    for (const auto& [label, m] : report->rep.models) {
      if (static_cast<int>(label) != model_kind) continue;
      const std::string which = metric;
      if (which == "mse") *out = m.mse_value;
      else if (which == "rmse") *out = m.rmse_value();
      else if (which == "accuracy") *out = m.accuracy_value;
      else if (which == "time_s") *out = m.eval_time_s;
      else throw std::invalid_argument("unknown metric: " + which);
      return UREGM_OK;
    }
    throw std::invalid_argument("model not present in report");
  });
}

void uregm_report_free(uregm_report* report) { delete report; }

/* ---- anchor curves ------------------------------------------------------ */

int uregm_cpu_curve(double task_count, double* out_percent) {
  if (int rc = require(out_percent, "out_percent")) return rc;
  return guarded([&] {
    *out_percent = uregm::cpu_curve(task_count);
    return UREGM_OK;
  });
}

int uregm_mem_curve(double task_count, double* out_percent) {
  if (int rc = require(out_percent, "out_percent")) return rc;
  return guarded([&] {
    *out_percent = uregm::mem_curve(task_count);
    return UREGM_OK;
  });
}

int uregm_anchor_tables_csv(char** out_csv) {
  if (int rc = require(out_csv, "out_csv")) return rc;
  return guarded([&] { return return_string(uregm::anchor_tables_csv(), out_csv); });
}

}  // extern "C"
