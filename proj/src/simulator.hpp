#ifndef UREGM_SIMULATOR_HPP
#define UREGM_SIMULATOR_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dataset.hpp"

namespace uregm {

// The six VM flavors the measurements were taken on.
struct VmProfile {
  int vm_id;
  int vcpu;
  double ram_gb;
  double disk_gb;
  const char* os_label;
};

const std::array<VmProfile, 6>& vm_profiles();

struct AnchorPoint {
  double task_count;
  double percent;
};

// Measured utilization anchors, by task count. The literal memory-actual
// series is non-monotone (3.10 after 3.7, 4.16 after 4.5, 6.28 after 6.9);
// the cleaned series is its isotonic adjustment and is what generation and
// interpolation use. The literal series are kept for audit output.
const std::vector<AnchorPoint>& cpu_actual_anchors();
const std::vector<AnchorPoint>& cpu_predicted_anchors();
const std::vector<AnchorPoint>& mem_actual_anchors_literal();
const std::vector<AnchorPoint>& mem_actual_anchors();  // cleaned
const std::vector<AnchorPoint>& mem_predicted_anchors();

// Piecewise-linear interpolation through the CPU-actual anchors, with linear
// extrapolation beyond the endpoints. Valid for 0 < task_count <= 10000.
double cpu_curve(double task_count);
// Same, over the cleaned memory-actual anchors.
double mem_curve(double task_count);

// Per-smell multiplier applied to both curves when generating targets.
double smell_scale(SmellType smell);

// Mean code-metric values per smell; rows are jittered around these. Order:
// wmc, lookahead, loc, parameter_count, fan_in, fan_out.
const std::array<const char*, 6>& code_metric_names();
const std::array<double, 6>& smell_metric_means(SmellType smell);

struct GenConfig {
  std::size_t rows = 1000;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
  std::array<double, kNumSmellTypes> smell_mix = {0.2, 0.2, 0.2, 0.2, 0.2};
  TargetKind target_kind = TargetKind::Cpu;
};

// Synthetic dataset anchored to the measured curves: task_count uniform on
// [250, 4500], VM profile uniform over the six flavors, smell type per
// smell_mix, code metrics jittered around the per-smell means, and
// delta_cpu = cpu_curve(t) * smell_scale + noise (delta_mem likewise over the
// memory curve). Fully deterministic per seed; rows are independent streams.
Dataset generate(const GenConfig& cfg);

// CSV dump of all anchor tables (literal and cleaned) for audit.
std::string anchor_tables_csv();

}  // namespace uregm

#endif
