#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "acceldse/param_space.hpp"

namespace acceldse {

// Units are fixed project-wide: GHz, ns, mW, um^2, mJ, ms.

struct BackendKnobs {
  double f_target_ghz = 1.0;
  double util = 0.7;
};

struct BackendResult {
  double power_mw = 0.0;
  double f_effective_ghz = 0.0;
  double area_um2 = 0.0;
  double worst_slack_ns = 0.0;
};

struct SystemResult {
  double energy_mj = 0.0;
  double runtime_ms = 0.0;
};

// Closed-form implementation stand-in. Constants are decided defaults chosen
// to exhibit the qualitative backend regimes: positive slack at low f_target,
// saturation at high f_target, and a utilization cliff above u0.
struct OracleParams {
  std::map<std::string, double> size_weights;  // per range parameter; default 1
  std::map<std::string, std::map<std::string, double>> choice_weights;  // per categorical
  double area_unit_um2 = 10000.0;  // A0
  double t0_ns = 0.5;
  double a = 0.3;   // logarithmic size slowdown
  double b = 8.0;   // utilization cliff strength
  double u0 = 0.7;  // cliff onset
  double margin_ns = 0.05;  // m: achievable slack margin below target period
  double p_leak_mw = 2.0;
  double p_dyn_mw_ns = 30.0;
  double workload_ops = 1e6;  // N_w
  double noise = 0.0;         // eta; multiplicative, seeded by (cfg, knobs)
  std::uint64_t seed = 0;

  static OracleParams from_json_file(const std::string& path);
  static OracleParams from_json_text(const std::string& text);
  std::string to_json_text() const;
};

// s = 1 + sum_k w_k * normalized range feature (categoricals add fixed
// per-choice weights); monotone nondecreasing in every range parameter.
double effective_size(const ParameterSpace& space, const Configuration& cfg,
                      const OracleParams& params);

BackendResult evaluate_backend(const ParameterSpace& space, const Configuration& cfg,
                               const BackendKnobs& knobs, const OracleParams& params);

SystemResult evaluate_system(const BackendResult& backend, const ParameterSpace& space,
                             const Configuration& cfg, const OracleParams& params);

struct DatasetRecord {
  Configuration cfg;
  BackendKnobs knobs;
  BackendResult backend;
  SystemResult system;
  bool roi = false;
};

// One record per (arch config x backend knob) pair, arch-major order, with ROI
// labels at the caller's epsilon.
std::vector<DatasetRecord> generate_dataset(const ParameterSpace& space,
                                            const std::vector<Configuration>& arch_cfgs,
                                            const std::vector<BackendKnobs>& knobs,
                                            const OracleParams& params, double eps);

std::string dataset_csv_header(const ParameterSpace& space);
std::string dataset_csv_row(const ParameterSpace& space, const DatasetRecord& rec,
                            std::size_t design_index);
std::string dataset_to_csv(const ParameterSpace& space,
                           const std::vector<DatasetRecord>& records);
std::vector<DatasetRecord> dataset_from_csv(const ParameterSpace& space,
                                            const std::string& text);

}  // namespace acceldse
