// Command-line front end for the uregm shared library. Orchestration only:
// all modelling goes through the C API; this file adds flag parsing, config
// merging, run manifests and exit-code policy (0 ok, 1 runtime failure,
// 2 usage error).

#include <uregm/uregm.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

struct CliError {
  int exit_code;
  std::string message;
};

std::string g_error_format = "text";

void report_error(const std::string& message, int code) {
  if (g_error_format == "json") {
    json err = {{"error", {{"code", code}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
  } else {
    std::cerr << "error: " << message << "\n";
  }
}

// Throws CliError for a failed C API call; invalid arguments are usage
// errors, everything else is a runtime failure.
void check(int rc) {
  if (rc == UREGM_OK) return;
  const int exit_code = (rc == UREGM_ERR_INVALID_ARGUMENT) ? 2 : 1;
  throw CliError{exit_code, uregm_last_error()};
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  uregm_string_free(s);
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{1, "cannot write file: " + path};
  out << content;
  if (!out) throw CliError{1, "write failed: " + path};
}

// Every primary output gets a sibling <path>.manifest.json naming the exact
// command, resolved flags and inputs; timings and timestamps live here so the
// primary artifacts stay byte-reproducible.
struct Manifest {
  std::string command;
  json flags = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  json timings = json::object();
  std::string started_at = iso8601_now();

  void write() const {
    json j = {{"command", command}, {"version", uregm_version()},
              {"flags", flags},     {"inputs", inputs},
              {"outputs", outputs}, {"started_at", started_at},
              {"finished_at", iso8601_now()}};
    if (!timings.empty()) j["timings_s"] = timings;
    for (const auto& out : outputs) {
      write_text_file(out + ".manifest.json", j.dump(2) + "\n");
    }
  }
};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Optional JSON config file; command-line flags win over config values.
json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw CliError{2, "cannot open config file: " + path};
  try {
    json j;
    in >> j;
    if (!j.is_object()) throw CliError{2, "config must be a JSON object"};
    return j;
  } catch (const json::exception& e) {
    throw CliError{2, std::string("invalid config JSON: ") + e.what()};
  }
}

template <typename T>
void config_override(const json& cfg, const CLI::App* cmd, const std::string& flag,
                     const std::string& key, T& value) {
  if (cmd->count(flag) > 0) return;
  const auto it = cfg.find(key);
  if (it == cfg.end()) return;
  try {
    value = it->get<T>();
  } catch (const json::exception&) {
    throw CliError{2, "config key \"" + key + "\" has the wrong type"};
  }
}

int parse_target(const std::string& token) {
  if (token == "cpu") return UREGM_TARGET_CPU;
  if (token == "mem") return UREGM_TARGET_MEM;
  throw CliError{2, "unknown target \"" + token + "\" (valid: cpu, mem)"};
}

int parse_model_kind(const std::string& token) {
  static const std::map<std::string, int> kinds = {
      {"lir", UREGM_MODEL_LIR},     {"pr", UREGM_MODEL_PR},
      {"lr", UREGM_MODEL_LR},       {"rf", UREGM_MODEL_RF},
      {"uregm", UREGM_MODEL_UREGM}, {"reap", UREGM_MODEL_REAP}};
  const auto it = kinds.find(token);
  if (it == kinds.end()) {
    throw CliError{2, "unknown model \"" + token +
                          "\" (valid: lir, pr, lr, rf, uregm, reap)"};
  }
  return it->second;
}

std::vector<double> parse_smell_mix(const std::string& csv) {
  std::vector<double> mix;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      mix.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw CliError{2, "invalid smell-mix value \"" + cell + "\""};
    }
  }
  if (mix.size() != 5) throw CliError{2, "smell-mix needs exactly 5 weights"};
  return mix;
}

using DatasetPtr = std::unique_ptr<uregm_dataset, decltype(&uregm_dataset_free)>;
using ModelPtr = std::unique_ptr<uregm_model, decltype(&uregm_model_free)>;
using GaResultPtr =
    std::unique_ptr<uregm_ga_result, decltype(&uregm_ga_result_free)>;
using ReportPtr = std::unique_ptr<uregm_report, decltype(&uregm_report_free)>;

DatasetPtr load_dataset(const std::string& path, int target) {
  uregm_dataset* ds = nullptr;
  size_t dropped = 0;
  check(uregm_dataset_load_csv(path.c_str(), target, &dropped, &ds));
  DatasetPtr out(ds, &uregm_dataset_free);
  size_t rows = 0;
  check(uregm_dataset_rows(ds, &rows));
  std::cerr << "loaded " << path << ": " << rows << " rows";
  if (dropped > 0) std::cerr << " (" << dropped << " dropped in cleaning)";
  std::cerr << "\n";
  return out;
}

std::vector<uint8_t> load_mask_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{1, "cannot open mask file: " + path};
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CliError{1, std::string("invalid mask JSON: ") + e.what()};
  }
  json bits;
  if (j.is_array()) bits = j;
  else if (j.contains("best_mask")) bits = j["best_mask"];
  else if (j.contains("mask")) bits = j["mask"];
  else throw CliError{1, "mask file has neither \"best_mask\" nor \"mask\""};
  std::vector<uint8_t> mask;
  for (const auto& b : bits) mask.push_back(b.get<int>() ? 1 : 0);
  if (mask.empty()) throw CliError{1, "mask file contains an empty mask"};
  return mask;
}

struct TrainFlags {
  uregm_train_params params;
  std::string config_path;

  void attach(CLI::App* cmd) {
    uregm_train_params_init(&params);
    cmd->add_option("--poly-degree", params.poly_degree, "PR expansion degree");
    cmd->add_option("--lasso-lambda", params.lasso_lambda, "LR l1 penalty");
    cmd->add_option("--rf-trees", params.rf_trees, "RF tree count");
    cmd->add_option("--rf-max-depth", params.rf_max_depth, "RF depth cap");
    cmd->add_option("--rf-min-leaf", params.rf_min_leaf, "RF min rows per leaf");
  }

  void merge_config(const json& cfg, const CLI::App* cmd) {
    config_override(cfg, cmd, "--poly-degree", "poly_degree", params.poly_degree);
    config_override(cfg, cmd, "--lasso-lambda", "lasso_lambda", params.lasso_lambda);
    config_override(cfg, cmd, "--rf-trees", "rf_trees", params.rf_trees);
    config_override(cfg, cmd, "--rf-max-depth", "rf_max_depth", params.rf_max_depth);
    config_override(cfg, cmd, "--rf-min-leaf", "rf_min_leaf", params.rf_min_leaf);
  }

  json to_json() const {
    return {{"poly_degree", params.poly_degree},
            {"lasso_lambda", params.lasso_lambda},
            {"rf_trees", params.rf_trees},
            {"rf_max_depth", params.rf_max_depth},
            {"rf_min_leaf", params.rf_min_leaf}};
  }
};

// ---- gen-data --------------------------------------------------------

int cmd_gen_data(const CLI::App* cmd, size_t rows, uint64_t seed, double noise,
                 const std::string& target, const std::string& smell_mix,
                 const std::string& out_path, bool anchors,
                 const std::string& config_path) {
  if (anchors) {
    char* csv = nullptr;
    check(uregm_anchor_tables_csv(&csv));
    std::cout << take_string(csv);
    return 0;
  }

  const json cfg = load_config(config_path);
  config_override(cfg, cmd, "--rows", "rows", rows);
  config_override(cfg, cmd, "--seed", "seed", seed);
  config_override(cfg, cmd, "--noise", "noise", noise);

  if (out_path.empty()) throw CliError{2, "--out is required"};
  if (rows < 10) throw CliError{2, "rows must be >= 10"};
  if (noise < 0.0) throw CliError{2, "noise must be >= 0"};
  const int target_kind = parse_target(target);

  std::vector<double> mix;
  const double* mix_ptr = nullptr;
  if (!smell_mix.empty()) {
    mix = parse_smell_mix(smell_mix);
    mix_ptr = mix.data();
  }

  Manifest manifest;
  manifest.command = "gen-data";
  manifest.flags = {{"rows", rows},     {"seed", seed},
                    {"noise", noise},   {"target", target},
                    {"smell_mix", smell_mix.empty() ? "uniform" : smell_mix},
                    {"out", out_path}};
  manifest.outputs = {out_path};

  const auto t0 = std::chrono::steady_clock::now();
  uregm_dataset* ds = nullptr;
  check(uregm_dataset_generate(rows, noise, seed, target_kind, mix_ptr, &ds));
  DatasetPtr holder(ds, &uregm_dataset_free);
  check(uregm_dataset_save_csv(ds, out_path.c_str()));
  manifest.timings["generate"] = elapsed_s(t0);
  manifest.write();
  std::cerr << "wrote " << out_path << " (" << rows << " rows)\n";
  return 0;
}

// ---- select-features --------------------------------------------------

int cmd_select_features(const CLI::App* cmd, const std::string& data_path,
                        const std::string& target, uregm_ga_params params,
                        const std::string& out_path,
                        const std::string& config_path) {
  const json cfg = load_config(config_path);
  config_override(cfg, cmd, "--generations", "generations", params.generations);
  config_override(cfg, cmd, "--population", "population", params.population_size);
  config_override(cfg, cmd, "--seed", "seed", params.seed);
  config_override(cfg, cmd, "--folds", "folds", params.fitness_folds);

  const int target_kind = parse_target(target);
  auto ds = load_dataset(data_path, target_kind);

  Manifest manifest;
  manifest.command = "select-features";
  manifest.flags = {{"data", data_path},
                    {"target", target},
                    {"generations", params.generations},
                    {"population", params.population_size},
                    {"elitism", params.elitism},
                    {"crossover_rate", params.crossover_rate},
                    {"mutation_rate", params.mutation_rate},
                    {"folds", params.fitness_folds},
                    {"seed", params.seed},
                    {"jobs", params.jobs},
                    {"out", out_path}};
  manifest.inputs = {data_path};
  manifest.outputs = {out_path};

  const auto t0 = std::chrono::steady_clock::now();
  uregm_ga_result* result = nullptr;
  check(uregm_select_features(ds.get(), &params, &result));
  GaResultPtr holder(result, &uregm_ga_result_free);
  manifest.timings["select_features"] = elapsed_s(t0);

  char* json_text = nullptr;
  check(uregm_ga_result_to_json(result, &json_text));
  write_text_file(out_path, take_string(json_text));
  manifest.write();

  double best = 0.0;
  check(uregm_ga_result_best_fitness(result, &best));
  std::cerr << "wrote " << out_path << " (best fitness " << best << ")\n";
  return 0;
}

// ---- train -------------------------------------------------------------

int cmd_train(const CLI::App* cmd, const std::string& data_path,
              const std::string& target, const std::string& mask_path,
              const std::string& model_token, TrainFlags& train_flags,
              size_t folds, uint64_t seed, size_t jobs,
              const std::string& out_path, const std::string& config_path) {
  const json cfg = load_config(config_path);
  size_t folds_v = folds;
  uint64_t seed_v = seed;
  config_override(cfg, cmd, "--folds", "folds", folds_v);
  config_override(cfg, cmd, "--seed", "seed", seed_v);
  train_flags.merge_config(cfg, cmd);

  const int model_kind = parse_model_kind(model_token);
  const int target_kind = parse_target(target);
  auto ds = load_dataset(data_path, target_kind);

  std::vector<uint8_t> mask;
  const uint8_t* mask_ptr = nullptr;
  if (!mask_path.empty()) {
    mask = load_mask_file(mask_path);
    mask_ptr = mask.data();
  }

  train_flags.params.folds = folds_v;
  train_flags.params.seed = seed_v;
  train_flags.params.jobs = jobs;

  Manifest manifest;
  manifest.command = "train";
  manifest.flags = train_flags.to_json();
  manifest.flags.update({{"data", data_path},
                         {"target", target},
                         {"mask", mask_path},
                         {"model", model_token},
                         {"folds", folds_v},
                         {"seed", seed_v},
                         {"jobs", jobs},
                         {"out", out_path}});
  manifest.inputs = {data_path};
  if (!mask_path.empty()) manifest.inputs.push_back(mask_path);
  manifest.outputs = {out_path};

  const auto t0 = std::chrono::steady_clock::now();
  uregm_model* model = nullptr;
  check(uregm_train(ds.get(), mask_ptr, mask.size(), model_kind,
                    &train_flags.params, &model));
  ModelPtr holder(model, &uregm_model_free);
  manifest.timings["train"] = elapsed_s(t0);

  check(uregm_model_save(model, out_path.c_str()));
  manifest.write();
  std::cerr << "wrote " << out_path << "\n";
  return 0;
}

// ---- predict -------------------------------------------------------------

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path) {
  uregm_model* model = nullptr;
  check(uregm_model_load(model_path.c_str(), &model));
  ModelPtr holder(model, &uregm_model_free);

  uregm_dataset* ds = nullptr;
  size_t dropped = 0;
  check(uregm_dataset_load_csv(data_path.c_str(), UREGM_TARGET_NONE, &dropped, &ds));
  DatasetPtr ds_holder(ds, &uregm_dataset_free);

  size_t rows = 0;
  check(uregm_dataset_rows(ds, &rows));
  std::vector<double> preds(rows);
  check(uregm_model_predict(model, ds, preds.data(), rows));

  std::ostringstream out;
  out << "sample_id,prediction\n";
  for (size_t i = 0; i < rows; ++i) {
    const char* id = nullptr;
    check(uregm_dataset_sample_id(ds, i, &id));
    out << id << ',' << format_double(preds[i]) << '\n';
  }

  Manifest manifest;
  manifest.command = "predict";
  manifest.flags = {{"model", model_path}, {"data", data_path}, {"out", out_path}};
  manifest.inputs = {model_path, data_path};
  manifest.outputs = {out_path};
  write_text_file(out_path, out.str());
  manifest.write();
  std::cerr << "wrote " << out_path << " (" << rows << " predictions)\n";
  return 0;
}

// ---- evaluate --------------------------------------------------------------

int cmd_evaluate(const CLI::App* cmd, const std::string& data_path,
                 const std::string& target, const std::string& models_csv,
                 TrainFlags& train_flags, size_t folds, uint64_t seed,
                 size_t jobs, const std::string& report_path,
                 const std::string& format, const std::string& config_path) {
  const json cfg = load_config(config_path);
  size_t folds_v = folds;
  uint64_t seed_v = seed;
  config_override(cfg, cmd, "--folds", "folds", folds_v);
  config_override(cfg, cmd, "--seed", "seed", seed_v);
  train_flags.merge_config(cfg, cmd);

  int render_format = UREGM_FORMAT_TEXT;
  if (format == "json") render_format = UREGM_FORMAT_JSON;
  else if (format == "csv") render_format = UREGM_FORMAT_CSV;
  else if (format != "text") {
    throw CliError{2, "unknown format \"" + format + "\" (valid: text, json, csv)"};
  }

  std::vector<int> kinds;
  {
    std::stringstream ss(models_csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
      if (!token.empty()) kinds.push_back(parse_model_kind(token));
    }
  }
  if (kinds.empty()) throw CliError{2, "--models must name at least one model"};

  const int target_kind = parse_target(target);
  auto ds = load_dataset(data_path, target_kind);

  train_flags.params.folds = folds_v;
  train_flags.params.seed = seed_v;

  Manifest manifest;
  manifest.command = "evaluate";
  manifest.flags = train_flags.to_json();
  manifest.flags.update({{"data", data_path},
                         {"target", target},
                         {"models", models_csv},
                         {"folds", folds_v},
                         {"seed", seed_v},
                         {"jobs", jobs},
                         {"report", report_path},
                         {"format", format}});
  manifest.inputs = {data_path};

  const auto t0 = std::chrono::steady_clock::now();
  uregm_report* report = nullptr;
  check(uregm_evaluate(ds.get(), kinds.data(), kinds.size(), folds_v, seed_v,
                       jobs, &train_flags.params, &report));
  ReportPtr holder(report, &uregm_report_free);
  manifest.timings["evaluate"] = elapsed_s(t0);
  for (int kind : kinds) {
    double t = 0.0;
    check(uregm_report_metric(report, kind, "time_s", &t));
    manifest.timings["models"][std::to_string(kind)] = t;
  }

  char* rendered = nullptr;
  check(uregm_report_render(report, render_format, &rendered));
  std::cout << take_string(rendered);

  if (!report_path.empty()) {
    char* report_json = nullptr;
    check(uregm_report_render(report, UREGM_FORMAT_JSON, &report_json));
    manifest.outputs = {report_path};
    write_text_file(report_path, take_string(report_json));
    manifest.write();
    std::cerr << "wrote " << report_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uregm: predict resource-consumption change from refactoring code smells"};
  app.set_version_flag("--version", uregm_version());
  app.require_subcommand(1);

  std::string error_format = "text";

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset CSV");
  size_t gen_rows = 1000;
  uint64_t gen_seed = 0;
  double gen_noise = 0.1;
  std::string gen_target = "cpu", gen_mix, gen_out, gen_config;
  bool gen_anchors = false;
  gen->add_option("--rows", gen_rows, "row count (>= 10)");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--noise", gen_noise, "target noise sigma (pp)");
  gen->add_option("--target", gen_target, "cpu or mem (recorded; both deltas are written)");
  gen->add_option("--smell-mix", gen_mix, "5 comma-separated smell weights");
  gen->add_option("--out", gen_out, "output CSV path");
  gen->add_flag("--anchors", gen_anchors, "dump anchor tables as CSV to stdout and exit");
  gen->add_option("--config", gen_config, "JSON config file (flags win)");
  gen->add_option("--format", error_format, "error format: text or json");

  // select-features
  auto* sel = app.add_subcommand("select-features", "GA wrapper feature selection");
  std::string sel_data, sel_target = "cpu", sel_out, sel_config;
  uregm_ga_params sel_params;
  uregm_ga_params_init(&sel_params);
  sel->add_option("--data", sel_data, "input CSV")->required();
  sel->add_option("--target", sel_target, "cpu or mem");
  sel->add_option("--generations", sel_params.generations, "GA generations");
  sel->add_option("--population", sel_params.population_size, "population size");
  sel->add_option("--elitism", sel_params.elitism, "elite individuals kept");
  sel->add_option("--crossover-rate", sel_params.crossover_rate, "crossover probability");
  sel->add_option("--mutation-rate", sel_params.mutation_rate, "per-gene flip probability");
  sel->add_option("--folds", sel_params.fitness_folds, "fitness cross-validation folds");
  sel->add_option("--seed", sel_params.seed, "GA seed");
  sel->add_option("--jobs", sel_params.jobs, "max parallel fitness evaluations");
  sel->add_option("--out", sel_out, "output mask JSON")->required();
  sel->add_option("--config", sel_config, "JSON config file (flags win)");
  sel->add_option("--format", error_format, "error format: text or json");

  // train
  auto* train = app.add_subcommand("train", "train one model");
  std::string train_data, train_target = "cpu", train_mask, train_model, train_out,
      train_config;
  size_t train_folds = 5, train_jobs = 1;
  uint64_t train_seed = 0;
  TrainFlags train_flags;
  train->add_option("--data", train_data, "input CSV")->required();
  train->add_option("--target", train_target, "cpu or mem");
  train->add_option("--mask", train_mask, "mask JSON from select-features (default: all features)");
  train->add_option("--model", train_model, "lir|pr|lr|rf|uregm|reap")->required();
  train->add_option("--folds", train_folds, "ensemble cross-validation folds");
  train->add_option("--seed", train_seed, "training seed");
  train->add_option("--jobs", train_jobs, "max parallel workers");
  train->add_option("--out", train_out, "output model JSON")->required();
  train_flags.attach(train);
  train->add_option("--config", train_config, "JSON config file (flags win)");
  train->add_option("--format", error_format, "error format: text or json");

  // predict
  auto* predict = app.add_subcommand("predict", "predict with a saved model");
  std::string pred_model, pred_data, pred_out;
  predict->add_option("--model", pred_model, "model JSON")->required();
  predict->add_option("--data", pred_data, "input CSV")->required();
  predict->add_option("--out", pred_out, "output predictions CSV")->required();
  predict->add_option("--format", error_format, "error format: text or json");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "cross-validated model comparison");
  std::string eval_data, eval_target = "cpu", eval_models = "lir,pr,lr,rf,reap,uregm",
      eval_report, eval_format = "text", eval_config;
  size_t eval_folds = 5, eval_jobs = 1;
  uint64_t eval_seed = 0;
  TrainFlags eval_flags;
  eval->add_option("--data", eval_data, "input CSV")->required();
  eval->add_option("--target", eval_target, "cpu or mem");
  eval->add_option("--models", eval_models, "comma-separated model tokens");
  eval->add_option("--folds", eval_folds, "cross-validation folds");
  eval->add_option("--seed", eval_seed, "evaluation seed");
  eval->add_option("--jobs", eval_jobs, "max parallel workers");
  eval->add_option("--report", eval_report, "report JSON output path");
  eval->add_option("--format", eval_format, "stdout format: text, json or csv");
  eval_flags.attach(eval);
  eval->add_option("--config", eval_config, "JSON config file (flags win)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    g_error_format = error_format;
    report_error(e.what(), 2);
    return 2;
  }
  g_error_format = (error_format == "json") ? "json" : "text";
  if (eval->parsed() && eval_format == "json") g_error_format = "json";

  try {
    if (gen->parsed()) {
      return cmd_gen_data(gen, gen_rows, gen_seed, gen_noise, gen_target,
                          gen_mix, gen_out, gen_anchors, gen_config);
    }
    if (sel->parsed()) {
      return cmd_select_features(sel, sel_data, sel_target, sel_params, sel_out,
                                 sel_config);
    }
    if (train->parsed()) {
      return cmd_train(train, train_data, train_target, train_mask, train_model,
                       train_flags, train_folds, train_seed, train_jobs,
                       train_out, train_config);
    }
    if (predict->parsed()) {
      return cmd_predict(pred_model, pred_data, pred_out);
    }
    if (eval->parsed()) {
      return cmd_evaluate(eval, eval_data, eval_target, eval_models, eval_flags,
                          eval_folds, eval_seed, eval_jobs, eval_report,
                          eval_format, eval_config);
    }
  } catch (const CliError& e) {
    report_error(e.message, e.exit_code);
    return e.exit_code;
  } catch (const std::exception& e) {
    report_error(e.what(), 1);
    return 1;
  }
  return 0;
}
