/*
 * uregm - prediction of CPU/memory consumption changes caused by refactoring
 * code smells: GA feature selection, four base regressors, a unified
 * model-combination search, an evaluation harness, and a synthetic workload
 * generator anchored to measured utilization curves.
 *
 * C API. All functions return UREGM_OK (0) on success or a negative error
 * code; uregm_last_error() describes the most recent failure on the calling
 * thread. Objects are opaque handles released with their _free function.
 * Strings returned through char** out parameters are heap-allocated and must
 * be released with uregm_string_free().
 *
 * Every operation is deterministic: identical inputs and seeds produce
 * identical outputs (including byte-identical CSV/JSON renderings) regardless
 * of the jobs count.
 */

#ifndef UREGM_UREGM_H
#define UREGM_UREGM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define UREGM_VERSION_STRING "0.1.0"

/* Error codes. */
enum {
  UREGM_OK = 0,
  UREGM_ERR_INVALID_ARGUMENT = -1, /* bad parameter or precondition violation */
  UREGM_ERR_RUNTIME = -2,          /* I/O, parse or training failure */
  UREGM_ERR_NULL_POINTER = -3,
  UREGM_ERR_INTERNAL = -4,
};

/* Prediction targets. */
enum {
  UREGM_TARGET_CPU = 0,
  UREGM_TARGET_MEM = 1,
  UREGM_TARGET_NONE = 2, /* prediction-input loads: delta columns optional */
};

/* Model kinds accepted by uregm_train and uregm_evaluate. */
enum {
  UREGM_MODEL_LIR = 0,   /* linear regression */
  UREGM_MODEL_PR = 1,    /* polynomial regression */
  UREGM_MODEL_LR = 2,    /* lasso regression */
  UREGM_MODEL_RF = 3,    /* random forest */
  UREGM_MODEL_REAP = 4,  /* fixed all-member stacking baseline */
  UREGM_MODEL_UREGM = 5, /* unified model-combination search */
};

/* Report rendering formats. */
enum {
  UREGM_FORMAT_TEXT = 0,
  UREGM_FORMAT_JSON = 1,
  UREGM_FORMAT_CSV = 2,
};

typedef struct uregm_dataset uregm_dataset;
typedef struct uregm_ga_result uregm_ga_result;
typedef struct uregm_model uregm_model;
typedef struct uregm_report uregm_report;

const char* uregm_version(void);

/* Message for the most recent error on this thread; empty if none. */
const char* uregm_last_error(void);

void uregm_string_free(char* s);

/* ---- datasets ------------------------------------------------------- */

/*
 * Loads the CSV schema (sample_id, smell_type, feature columns, delta_cpu,
 * delta_mem; column order free). Rows with null/empty/non-numeric cells in a
 * feature or target column are dropped; *rows_dropped (optional) receives the
 * count. With UREGM_TARGET_NONE the delta columns are optional and rows must
 * be complete.
 */
int uregm_dataset_load_csv(const char* path, int target, size_t* rows_dropped,
                           uregm_dataset** out);

/*
 * Synthetic dataset anchored to the measured utilization curves. smell_mix is
 * either NULL (uniform) or 5 non-negative weights summing to 1 in the order
 * god_class, god_method, cyclic_dependency, long_parameter, spaghetti_code.
 * rows must be >= 10.
 */
int uregm_dataset_generate(size_t rows, double noise_sigma, uint64_t seed,
                           int target, const double* smell_mix,
                           uregm_dataset** out);

int uregm_dataset_save_csv(const uregm_dataset* ds, const char* path);
int uregm_dataset_to_csv(const uregm_dataset* ds, char** out_csv);
int uregm_dataset_rows(const uregm_dataset* ds, size_t* out);
int uregm_dataset_num_features(const uregm_dataset* ds, size_t* out);
int uregm_dataset_feature_name(const uregm_dataset* ds, size_t index,
                               const char** out);
int uregm_dataset_sample_id(const uregm_dataset* ds, size_t index,
                            const char** out);

/* Seeded shuffle, then prefix/suffix split with ceil(fraction*n) train rows.
 * Both partitions must end up non-empty. */
int uregm_dataset_split(const uregm_dataset* ds, double train_fraction,
                        uint64_t seed, uregm_dataset** out_train,
                        uregm_dataset** out_test);

void uregm_dataset_free(uregm_dataset* ds);

/* ---- genetic-algorithm feature selection ---------------------------- */

typedef struct uregm_ga_params {
  size_t population_size; /* default 30 */
  size_t generations;     /* default 50 */
  double crossover_rate;  /* default 0.8 */
  double mutation_rate;   /* per-gene; < 0 selects 1/num_features */
  size_t elitism;         /* default 2 */
  uint64_t seed;
  size_t fitness_folds;   /* default 5 */
  size_t jobs;            /* default 1 */
} uregm_ga_params;

void uregm_ga_params_init(uregm_ga_params* params);

int uregm_select_features(const uregm_dataset* ds,
                          const uregm_ga_params* params,
                          uregm_ga_result** out);

int uregm_ga_result_mask_len(const uregm_ga_result* result, size_t* out);
int uregm_ga_result_mask(const uregm_ga_result* result, uint8_t* bits,
                         size_t len);
int uregm_ga_result_best_fitness(const uregm_ga_result* result, double* out);
int uregm_ga_result_to_json(const uregm_ga_result* result, char** out_json);
void uregm_ga_result_free(uregm_ga_result* result);

/* ---- training and prediction ---------------------------------------- */

typedef struct uregm_train_params {
  int poly_degree;            /* default 2 */
  double lasso_lambda;        /* default 0.1 */
  int lasso_max_sweeps;       /* default 1000 */
  double lasso_tol;           /* default 1e-8 */
  int rf_trees;               /* default 100 */
  int rf_max_depth;           /* default 12 */
  int rf_min_leaf;            /* default 2 */
  double rf_feature_subsample;/* default 1/3 */
  size_t folds;               /* ensemble cross-validation folds, default 5 */
  uint64_t seed;
  size_t jobs;                /* default 1 */
} uregm_train_params;

void uregm_train_params_init(uregm_train_params* params);

/*
 * Trains one model on the dataset's selected target. mask_bits is either NULL
 * (all features) or one 0/1 byte per feature column. For UREGM_MODEL_UREGM
 * the model records the full 15-combination search log; for UREGM_MODEL_REAP
 * the fixed four-member stack is fit with an unconstrained least-squares
 * combiner.
 */
int uregm_train(const uregm_dataset* ds, const uint8_t* mask_bits,
                size_t mask_len, int model_kind,
                const uregm_train_params* params, uregm_model** out);

int uregm_model_to_json(const uregm_model* model, char** out_json);
int uregm_model_from_json(const char* json_text, uregm_model** out);
int uregm_model_save(const uregm_model* model, const char* path);
int uregm_model_load(const char* path, uregm_model** out);

/* One prediction per dataset row, in row order. len must equal the dataset's
 * row count; features are matched to the model by column name. */
int uregm_model_predict(const uregm_model* model, const uregm_dataset* ds,
                        double* out_predictions, size_t len);

void uregm_model_free(uregm_model* model);

/* ---- evaluation ------------------------------------------------------ */

/*
 * Cross-validated comparison of the requested models on one shared fold
 * partition (metrics: mse, rmse, accuracy = 100 - MAPE floored at 0, wall
 * time). model_kinds may include any of the six kinds, each at most once.
 */
int uregm_evaluate(const uregm_dataset* ds, const int* model_kinds,
                   size_t num_models, size_t folds, uint64_t seed, size_t jobs,
                   const uregm_train_params* params, uregm_report** out);

int uregm_report_render(const uregm_report* report, int format,
                        char** out_text);

/* metric is one of "mse", "rmse", "accuracy", "time_s". */
int uregm_report_metric(const uregm_report* report, int model_kind,
                        const char* metric, double* out);

void uregm_report_free(uregm_report* report);

/* ---- measured anchor curves ------------------------------------------ */

/* Piecewise-linear interpolation through the measured utilization anchors;
 * task_count must lie in (0, 10000]. */
int uregm_cpu_curve(double task_count, double* out_percent);
int uregm_mem_curve(double task_count, double* out_percent);

/* CSV dump of the anchor tables (literal and cleaned) for audit. */
int uregm_anchor_tables_csv(char** out_csv);

#ifdef __cplusplus
}
#endif

#endif /* UREGM_UREGM_H */
