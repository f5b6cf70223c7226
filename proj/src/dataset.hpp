#ifndef UREGM_DATASET_HPP
#define UREGM_DATASET_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace uregm {

// The five refactorable smell categories. Parsing any other token is an error.
enum class SmellType {
  GodClass = 0,
  GodMethod = 1,
  CyclicDependency = 2,
  LongParameter = 3,
  SpaghettiCode = 4,
};
inline constexpr int kNumSmellTypes = 5;

const char* to_string(SmellType s);
std::optional<SmellType> parse_smell_type(const std::string& token);

enum class TargetKind { Cpu = 0, Memory = 1, None = 2 };

const char* to_string(TargetKind t);

// One cleaned tabular dataset. Every row exposes exactly the columns in
// feature_names, in that order; the two delta columns are carried side by
// side and target_kind selects which one training reads.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::string> sample_ids;
  std::vector<SmellType> smell_types;  // empty for prediction-only loads
  Eigen::MatrixXd features;            // rows x feature_names.size()
  Eigen::VectorXd delta_cpu;
  Eigen::VectorXd delta_mem;
  TargetKind target_kind = TargetKind::Cpu;

  std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t num_features() const { return feature_names.size(); }
  const Eigen::VectorXd& target() const;

  // Column index for a feature name, or -1.
  int feature_index(const std::string& name) const;

  Dataset subset(const std::vector<std::size_t>& row_indices) const;
};

struct LoadSummary {
  std::size_t rows_loaded = 0;
  std::size_t rows_dropped = 0;
};

// Bit-vector over feature columns; the unit of feature selection. Any mask
// used for training must have at least one bit set.
struct FeatureMask {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  bool test(std::size_t i) const { return bits[i] != 0; }
  std::size_t count() const;
  bool any() const { return count() > 0; }
  std::vector<std::size_t> selected() const;

  static FeatureMask all(std::size_t n) { return FeatureMask{std::vector<std::uint8_t>(n, 1)}; }
  static FeatureMask none(std::size_t n) { return FeatureMask{std::vector<std::uint8_t>(n, 0)}; }

  bool operator==(const FeatureMask&) const = default;
  // Orders by population count, then lexicographically; the deterministic
  // tie-break used everywhere a best mask is chosen.
  static bool prefer(const FeatureMask& a, const FeatureMask& b);
};

// Reads the CSV schema (sample_id, smell_type, features..., delta_cpu,
// delta_mem; order of columns free, names required). Rows with a null, empty
// or non-numeric cell in any feature column or in the selected target column
// are dropped; surviving rows keep file order. Nulls are empty cells or the
// literal "NA". With TargetKind::None the delta columns become optional and
// nothing is dropped (prediction input must be fully numeric or the load
// fails).
Dataset load_csv(const std::string& path, TargetKind target,
                 LoadSummary* summary = nullptr);

void write_csv(const Dataset& ds, const std::string& path);
std::string to_csv(const Dataset& ds);

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

// Deterministic shuffle (Fisher-Yates over a seed-derived stream) followed by
// a prefix/suffix split. Train size is ceil(train_fraction * n); both
// partitions must be non-empty.
std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec);

// Per-column mean/population-std statistics. Zero-variance columns are
// flagged and standardize to all-zeros.
struct NormStats {
  std::vector<double> means;
  std::vector<double> stds;
  std::vector<bool> zero_variance;

  std::size_t size() const { return means.size(); }

  static NormStats fit(const Eigen::MatrixXd& x);
  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& z) const;
};

// Standardizes every feature column of ds in place of a copy; targets are
// left untouched.
std::pair<Dataset, NormStats> standardize(const Dataset& ds);

}  // namespace uregm

#endif
