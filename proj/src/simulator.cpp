#include "simulator.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rng.hpp"

namespace uregm {

const std::array<VmProfile, 6>& vm_profiles() {
  static const std::array<VmProfile, 6> profiles = {{
      {1, 1, 0.5, 50.0, "Ubuntu 18.04"},
      {2, 1, 1.0, 256.0, "CentOS 7"},
      {3, 2, 2.0, 500.0, "Ubuntu 18.04"},
      {4, 2, 4.0, 500.0, "CentOS 7"},
      {5, 4, 4.0, 500.0, "Ubuntu 18.04"},
      {6, 4, 6.0, 500.0, "CentOS 7"},
  }};
  return profiles;
}

const std::vector<AnchorPoint>& cpu_actual_anchors() {
  static const std::vector<AnchorPoint> a = {
      {500, 3.8}, {1000, 4.1}, {1500, 4.6}, {2000, 5.3},
      {2500, 5.9}, {3000, 6.7}, {3500, 7.6}, {4000, 8.2}};
  return a;
}

const std::vector<AnchorPoint>& cpu_predicted_anchors() {
  static const std::vector<AnchorPoint> a = {
      {500, 3.6}, {1000, 4.0}, {1500, 4.2}, {2000, 5.0},
      {2500, 5.9}, {3000, 6.6}, {3500, 7.3}, {4000, 7.8}};
  return a;
}

const std::vector<AnchorPoint>& mem_actual_anchors_literal() {
  static const std::vector<AnchorPoint> a = {
      {500, 3.4}, {1000, 3.7}, {1500, 3.10}, {2000, 4.5},
      {2500, 4.16}, {3000, 6.9}, {3500, 6.28}, {4000, 7.9}};
  return a;
}

const std::vector<AnchorPoint>& mem_actual_anchors() {
  static const std::vector<AnchorPoint> a = {
      {500, 3.4}, {1000, 3.7}, {1500, 4.1}, {2000, 4.5},
      {2500, 5.2}, {3000, 6.4}, {3500, 7.1}, {4000, 7.9}};
  return a;
}

const std::vector<AnchorPoint>& mem_predicted_anchors() {
  static const std::vector<AnchorPoint> a = {
      {500, 2.9}, {1000, 3.4}, {1500, 3.8}, {2000, 4.3},
      {2500, 4.9}, {3000, 6.2}, {3500, 6.12}, {4000, 7.4}};
  return a;
}

namespace {

double interpolate(const std::vector<AnchorPoint>& anchors, double t) {
  if (!(t > 0.0) || t > 10000.0) {
    throw std::invalid_argument("task_count out of range (0, 10000]");
  }
  std::size_t hi = 1;
  while (hi + 1 < anchors.size() && t > anchors[hi].task_count) ++hi;
  const auto& a = anchors[hi - 1];
  const auto& b = anchors[hi];
  const double slope = (b.percent - a.percent) / (b.task_count - a.task_count);
  return a.percent + slope * (t - a.task_count);
}

}  // namespace

double cpu_curve(double task_count) {
  return interpolate(cpu_actual_anchors(), task_count);
}

double mem_curve(double task_count) {
  return interpolate(mem_actual_anchors(), task_count);
}

double smell_scale(SmellType smell) {
  switch (smell) {
    case SmellType::GodClass: return 1.2;
    case SmellType::GodMethod: return 1.1;
    case SmellType::CyclicDependency: return 1.0;
    case SmellType::LongParameter: return 0.9;
    case SmellType::SpaghettiCode: return 0.8;
  }
  return 1.0;
}

const std::array<const char*, 6>& code_metric_names() {
  static const std::array<const char*, 6> names = {
      "wmc", "lookahead", "loc", "parameter_count", "fan_in", "fan_out"};
  return names;
}

const std::array<double, 6>& smell_metric_means(SmellType smell) {
  // wmc, lookahead, loc, parameter_count, fan_in, fan_out
  static const std::array<std::array<double, 6>, kNumSmellTypes> means = {{
      {62.0, 7.5, 1400.0, 3.0, 14.0, 18.0},  // god_class
      {38.0, 6.0, 420.0, 5.0, 9.0, 11.0},    // god_method
      {24.0, 5.0, 260.0, 4.0, 16.0, 16.0},   // cyclic_dependency
      {18.0, 4.0, 180.0, 9.0, 6.0, 7.0},     // long_parameter
      {30.0, 8.5, 700.0, 6.0, 8.0, 9.0},     // spaghetti_code
  }};
  return means[static_cast<std::size_t>(smell)];
}

Dataset generate(const GenConfig& cfg) {
  if (cfg.rows < 10) throw std::invalid_argument("rows must be >= 10");
  if (cfg.noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be >= 0");
  double mix_sum = 0.0;
  for (double m : cfg.smell_mix) {
    if (m < 0.0) throw std::invalid_argument("smell_mix entries must be >= 0");
    mix_sum += m;
  }
  if (std::abs(mix_sum - 1.0) > 1e-9) {
    throw std::invalid_argument("smell_mix must sum to 1");
  }
  if (cfg.target_kind == TargetKind::None) {
    throw std::invalid_argument("generate: target must be cpu or mem");
  }

  Dataset ds;
  ds.target_kind = cfg.target_kind;
  ds.feature_names = {"task_count", "data_size", "vcpu", "ram"};
  for (const char* name : code_metric_names()) ds.feature_names.emplace_back(name);

  const auto n = static_cast<Eigen::Index>(cfg.rows);
  ds.features.resize(n, static_cast<Eigen::Index>(ds.feature_names.size()));
  ds.delta_cpu.resize(n);
  ds.delta_mem.resize(n);
  ds.sample_ids.reserve(cfg.rows);
  ds.smell_types.reserve(cfg.rows);

  for (std::size_t i = 0; i < cfg.rows; ++i) {
    auto rng = derive_stream(cfg.seed, {stream_tag::kGenRow, i});

    const double task_count = 250.0 + static_cast<double>(rng.next_below(4251));
    const auto& vm = vm_profiles()[rng.next_below(vm_profiles().size())];

    const double u = rng.next_double();
    double cumulative = 0.0;
    SmellType smell = SmellType::SpaghettiCode;
    for (int s = 0; s < kNumSmellTypes; ++s) {
      cumulative += cfg.smell_mix[static_cast<std::size_t>(s)];
      if (u < cumulative) {
        smell = static_cast<SmellType>(s);
        break;
      }
    }

    const double data_size = 50.0 + rng.next_double() * (4096.0 - 50.0);

    const auto row = static_cast<Eigen::Index>(i);
    ds.features(row, 0) = task_count;
    ds.features(row, 1) = data_size;
    ds.features(row, 2) = static_cast<double>(vm.vcpu);
    ds.features(row, 3) = vm.ram_gb;
    const auto& means = smell_metric_means(smell);
    for (std::size_t m = 0; m < means.size(); ++m) {
      // 15% relative jitter; count-like metrics stay integral and >= 1.
      double value = means[m] * (1.0 + 0.15 * rng.next_normal());
      if (m == 1) {
        value = std::max(0.1, value);  // lookahead stays real-valued
      } else {
        value = std::max(1.0, std::round(value));
      }
      ds.features(row, static_cast<Eigen::Index>(4 + m)) = value;
    }

    const double scale = smell_scale(smell);
    const double cpu_noise = cfg.noise_sigma > 0.0 ? cfg.noise_sigma * rng.next_normal() : 0.0;
    const double mem_noise = cfg.noise_sigma > 0.0 ? cfg.noise_sigma * rng.next_normal() : 0.0;
    ds.delta_cpu[row] = cpu_curve(task_count) * scale + cpu_noise;
    ds.delta_mem[row] = mem_curve(task_count) * scale + mem_noise;

    ds.sample_ids.push_back("s" + std::to_string(i + 1));
    ds.smell_types.push_back(smell);
  }
  return ds;
}

std::string format_double(double v);  // serialize.cpp

std::string anchor_tables_csv() {
  std::ostringstream out;
  out << "task_count,cpu_predicted,cpu_actual,mem_predicted,mem_actual_literal,"
         "mem_actual_cleaned\n";
  const auto& cp = cpu_predicted_anchors();
  const auto& ca = cpu_actual_anchors();
  const auto& mp = mem_predicted_anchors();
  const auto& ml = mem_actual_anchors_literal();
  const auto& mc = mem_actual_anchors();
  for (std::size_t i = 0; i < ca.size(); ++i) {
    out << format_double(ca[i].task_count) << ',' << format_double(cp[i].percent)
        << ',' << format_double(ca[i].percent) << ',' << format_double(mp[i].percent)
        << ',' << format_double(ml[i].percent) << ',' << format_double(mc[i].percent)
        << '\n';
  }
  return out.str();
}

}  // namespace uregm
