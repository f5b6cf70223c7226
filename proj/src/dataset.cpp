#include "dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "rng.hpp"

namespace uregm {

const char* to_string(SmellType s) {
  switch (s) {
    case SmellType::GodClass: return "god_class";
    case SmellType::GodMethod: return "god_method";
    case SmellType::CyclicDependency: return "cyclic_dependency";
    case SmellType::LongParameter: return "long_parameter";
    case SmellType::SpaghettiCode: return "spaghetti_code";
  }
  return "?";
}

std::optional<SmellType> parse_smell_type(const std::string& token) {
  for (int i = 0; i < kNumSmellTypes; ++i) {
    if (token == to_string(static_cast<SmellType>(i))) {
      return static_cast<SmellType>(i);
    }
  }
  return std::nullopt;
}

const char* to_string(TargetKind t) {
  switch (t) {
    case TargetKind::Cpu: return "cpu";
    case TargetKind::Memory: return "mem";
    case TargetKind::None: return "none";
  }
  return "?";
}

const Eigen::VectorXd& Dataset::target() const {
  if (target_kind == TargetKind::Memory) return delta_mem;
  if (target_kind == TargetKind::Cpu) return delta_cpu;
  throw std::logic_error("dataset has no target column selected");
}

int Dataset::feature_index(const std::string& name) const {
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    if (feature_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Dataset Dataset::subset(const std::vector<std::size_t>& row_indices) const {
  Dataset out;
  out.feature_names = feature_names;
  out.target_kind = target_kind;
  const auto n = static_cast<Eigen::Index>(row_indices.size());
  out.features.resize(n, features.cols());
  out.delta_cpu.resize(n);
  out.delta_mem.resize(n);
  out.sample_ids.reserve(row_indices.size());
  if (!smell_types.empty()) out.smell_types.reserve(row_indices.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(row_indices[i]);
    out.features.row(i) = features.row(r);
    out.delta_cpu[i] = delta_cpu[r];
    out.delta_mem[i] = delta_mem[r];
    out.sample_ids.push_back(sample_ids[row_indices[i]]);
    if (!smell_types.empty()) out.smell_types.push_back(smell_types[row_indices[i]]);
  }
  return out;
}

std::size_t FeatureMask::count() const {
  std::size_t c = 0;
  for (auto b : bits) c += (b != 0);
  return c;
}

std::vector<std::size_t> FeatureMask::selected() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) idx.push_back(i);
  }
  return idx;
}

bool FeatureMask::prefer(const FeatureMask& a, const FeatureMask& b) {
  const auto ca = a.count(), cb = b.count();
  if (ca != cb) return ca < cb;
  return a.bits < b.bits;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  for (auto& cell : cells) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t");
    cell = (b == std::string::npos) ? std::string{} : cell.substr(b, e - b + 1);
  }
  return cells;
}

bool is_null_cell(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN";
}

bool parse_number(const std::string& cell, double& out) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

}  // namespace

std::string format_double(double v);  // defined in serialize.cpp

Dataset load_csv(const std::string& path, TargetKind target,
                 LoadSummary* summary) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
  const auto header = split_csv_line(line);

  int id_col = -1, smell_col = -1, cpu_col = -1, mem_col = -1;
  std::vector<int> feature_cols;
  std::vector<std::string> feature_names;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& name = header[i];
    if (name == "sample_id") id_col = static_cast<int>(i);
    else if (name == "smell_type") smell_col = static_cast<int>(i);
    else if (name == "delta_cpu") cpu_col = static_cast<int>(i);
    else if (name == "delta_mem") mem_col = static_cast<int>(i);
    else if (!name.empty()) {
      feature_cols.push_back(static_cast<int>(i));
      feature_names.push_back(name);
    }
  }
  if (id_col < 0) throw std::runtime_error("missing required column: sample_id");
  if (feature_cols.empty()) throw std::runtime_error("no feature columns found");
  if (target == TargetKind::Cpu && cpu_col < 0)
    throw std::runtime_error("missing target column: delta_cpu");
  if (target == TargetKind::Memory && mem_col < 0)
    throw std::runtime_error("missing target column: delta_mem");
  if (target != TargetKind::None && smell_col < 0)
    throw std::runtime_error("missing required column: smell_type");

  const bool predict_mode = (target == TargetKind::None);
  std::vector<std::string> ids;
  std::vector<SmellType> smells;
  std::vector<std::vector<double>> rows;
  std::vector<double> cpus, mems;
  std::unordered_set<std::string> seen_ids;
  std::size_t dropped = 0;
  std::size_t line_no = 1;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("row " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " cells, got " +
                               std::to_string(cells.size()));
    }

    SmellType smell = SmellType::CyclicDependency;
    bool has_smell = false;
    bool null_row = false;
    if (smell_col >= 0) {
      const auto& tok = cells[smell_col];
      if (is_null_cell(tok)) {
        null_row = true;
      } else {
        const auto parsed = parse_smell_type(tok);
        if (!parsed) {
          throw std::runtime_error("row " + std::to_string(line_no) +
                                   ": unknown smell_type \"" + tok + "\"");
        }
        smell = *parsed;
        has_smell = true;
      }
    }

    std::vector<double> feats(feature_cols.size());
    for (std::size_t f = 0; f < feature_cols.size() && !null_row; ++f) {
      const auto& cell = cells[feature_cols[f]];
      if (is_null_cell(cell) || !parse_number(cell, feats[f])) {
        if (predict_mode) {
          throw std::runtime_error("row " + std::to_string(line_no) +
                                   ": non-numeric value in feature column \"" +
                                   feature_names[f] + "\"");
        }
        null_row = true;
      }
    }

    double cpu = std::numeric_limits<double>::quiet_NaN();
    double mem = std::numeric_limits<double>::quiet_NaN();
    if (!null_row && cpu_col >= 0) {
      if (!parse_number(cells[cpu_col], cpu) && target == TargetKind::Cpu) null_row = true;
    }
    if (!null_row && mem_col >= 0) {
      if (!parse_number(cells[mem_col], mem) && target == TargetKind::Memory) null_row = true;
    }
    if (!null_row && cells[id_col].empty()) null_row = true;

    if (null_row) {
      if (predict_mode) {
        throw std::runtime_error("row " + std::to_string(line_no) +
                                 ": incomplete row in prediction input");
      }
      ++dropped;
      continue;
    }

    const auto& id = cells[id_col];
    if (!seen_ids.insert(id).second) {
      throw std::runtime_error("duplicate sample_id \"" + id + "\" at row " +
                               std::to_string(line_no));
    }
    ids.push_back(id);
    if (has_smell) smells.push_back(smell);
    rows.push_back(std::move(feats));
    cpus.push_back(cpu);
    mems.push_back(mem);
  }

  if (rows.empty()) {
    throw std::runtime_error("no rows survived cleaning in " + path);
  }
  if (!smells.empty() && smells.size() != rows.size()) {
    throw std::runtime_error("smell_type present for only part of the rows");
  }

  Dataset ds;
  ds.feature_names = std::move(feature_names);
  ds.sample_ids = std::move(ids);
  ds.smell_types = std::move(smells);
  ds.target_kind = target;
  const auto n = static_cast<Eigen::Index>(rows.size());
  ds.features.resize(n, static_cast<Eigen::Index>(feature_cols.size()));
  ds.delta_cpu.resize(n);
  ds.delta_mem.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
      ds.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    ds.delta_cpu[i] = cpus[static_cast<std::size_t>(i)];
    ds.delta_mem[i] = mems[static_cast<std::size_t>(i)];
  }

  if (summary) {
    summary->rows_loaded = rows.size();
    summary->rows_dropped = dropped;
  }
  return ds;
}

std::string to_csv(const Dataset& ds) {
  std::ostringstream out;
  out << "sample_id,smell_type";
  for (const auto& name : ds.feature_names) out << ',' << name;
  out << ",delta_cpu,delta_mem\n";
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    out << ds.sample_ids[i] << ',';
    out << (ds.smell_types.empty() ? "" : to_string(ds.smell_types[i]));
    for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
      out << ',' << format_double(ds.features(static_cast<Eigen::Index>(i), j));
    }
    out << ',' << format_double(ds.delta_cpu[static_cast<Eigen::Index>(i)]);
    out << ',' << format_double(ds.delta_mem[static_cast<Eigen::Index>(i)]);
    out << '\n';
  }
  return out.str();
}

void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << to_csv(ds);
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
  if (ds.rows() < 2) throw std::invalid_argument("split needs at least 2 rows");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must be in (0,1)");
  }
  const std::size_t n = ds.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = derive_stream(spec.seed, {stream_tag::kSplit});
  shuffle(order, rng);

  const auto train_n = static_cast<std::size_t>(
      std::ceil(spec.train_fraction * static_cast<double>(n)));
  if (train_n == 0) throw std::runtime_error("empty train partition");
  if (train_n >= n) throw std::runtime_error("empty test partition");

  std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<long>(train_n));
  std::vector<std::size_t> test_idx(order.begin() + static_cast<long>(train_n), order.end());
  return {ds.subset(train_idx), ds.subset(test_idx)};
}

NormStats NormStats::fit(const Eigen::MatrixXd& x) {
  NormStats s;
  const auto n = static_cast<double>(x.rows());
  s.means.resize(static_cast<std::size_t>(x.cols()));
  s.stds.resize(static_cast<std::size_t>(x.cols()));
  s.zero_variance.resize(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    const double var = (x.col(j).array() - mean).square().sum() / n;
    const double sd = std::sqrt(var);
    s.means[static_cast<std::size_t>(j)] = mean;
    s.stds[static_cast<std::size_t>(j)] = sd;
    s.zero_variance[static_cast<std::size_t>(j)] = (sd == 0.0);
  }
  return s;
}

Eigen::MatrixXd NormStats::transform(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.cols()) != size()) {
    throw std::invalid_argument("NormStats: column count mismatch");
  }
  Eigen::MatrixXd z(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto js = static_cast<std::size_t>(j);
    if (zero_variance[js]) {
      z.col(j).setZero();
    } else {
      z.col(j) = (x.col(j).array() - means[js]) / stds[js];
    }
  }
  return z;
}

Eigen::MatrixXd NormStats::inverse(const Eigen::MatrixXd& z) const {
  if (static_cast<std::size_t>(z.cols()) != size()) {
    throw std::invalid_argument("NormStats: column count mismatch");
  }
  Eigen::MatrixXd x(z.rows(), z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const auto js = static_cast<std::size_t>(j);
    if (zero_variance[js]) {
      x.col(j).setConstant(means[js]);
    } else {
      x.col(j) = z.col(j).array() * stds[js] + means[js];
    }
  }
  return x;
}

std::pair<Dataset, NormStats> standardize(const Dataset& ds) {
  auto stats = NormStats::fit(ds.features);
  Dataset out = ds;
  out.features = stats.transform(ds.features);
  return {std::move(out), std::move(stats)};
}

}  // namespace uregm
