#include <cmath>

#include "acceldse/oracle.hpp"
#include "acceldse/sampling.hpp"
#include "acceldse/surrogate/two_stage.hpp"
#include "doctest.h"

using namespace acceldse;

namespace {

ParameterSpace one_knob_space() {
  return ParameterSpace({ParameterSpec{"size", ParamKind::Float, 0.0, 1.0, {}, false}});
}

Configuration size_cfg(double v) {
  Configuration cfg;
  cfg.values["size"] = v;
  return cfg;
}

}  // namespace

TEST_CASE("effective size sums normalized weighted features") {
  const auto space = one_knob_space();
  const OracleParams params;
  CHECK(effective_size(space, size_cfg(0.0), params) == doctest::Approx(1.0));
  CHECK(effective_size(space, size_cfg(0.5), params) == doctest::Approx(1.5));
  CHECK(effective_size(space, size_cfg(1.0), params) == doctest::Approx(2.0));
}

TEST_CASE("effective size is monotone in every range parameter") {
  const ParameterSpace space({
      ParameterSpec{"a", ParamKind::Float, 0.0, 1.0, {}, false},
      ParameterSpec{"b", ParamKind::Int, 1, 9, {}, false},
  });
  const OracleParams params;
  double prev = 0.0;
  for (int i = 0; i <= 8; ++i) {
    Configuration cfg;
    cfg.values["a"] = 0.3;
    cfg.values["b"] = static_cast<double>(1 + i);
    const double s = effective_size(space, cfg, params);
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("backend positive-slack regime") {
  const auto space = one_knob_space();
  const OracleParams params;  // defaults
  BackendKnobs knobs{0.5, 0.5};
  const BackendResult r = evaluate_backend(space, size_cfg(1.0), knobs, params);
  // s=2: T_min = 0.5*(1+0.3*ln 2) = 0.6040 ns; T_eff = max(T_min, 2.0-0.05)=1.95
  CHECK(r.f_effective_ghz == doctest::Approx(1.0 / 1.95).epsilon(1e-6));
  CHECK(r.f_effective_ghz > knobs.f_target_ghz);
  CHECK(r.area_um2 == doctest::Approx(40000.0));
}

TEST_CASE("backend saturation regime") {
  const auto space = one_knob_space();
  const OracleParams params;
  BackendKnobs knobs{2.0, 0.5};
  const BackendResult r = evaluate_backend(space, size_cfg(1.0), knobs, params);
  const double t_min = 0.5 * (1.0 + 0.3 * std::log(2.0));
  CHECK(r.f_effective_ghz == doctest::Approx(1.0 / t_min).epsilon(1e-6));
  CHECK(r.f_effective_ghz == doctest::Approx(1.6556).epsilon(1e-3));
  CHECK(r.f_effective_ghz < knobs.f_target_ghz);
}

TEST_CASE("utilization cliff and area scaling") {
  const auto space = one_knob_space();
  const OracleParams params;
  const auto low = evaluate_backend(space, size_cfg(1.0), {1.0, 0.6}, params);
  const auto high = evaluate_backend(space, size_cfg(1.0), {1.0, 0.85}, params);
  CHECK(high.area_um2 < low.area_um2);  // A = A0*s/util
  // Above u0 the minimum period grows, so the achievable frequency drops in
  // the saturation regime.
  const auto sat_low = evaluate_backend(space, size_cfg(1.0), {2.2, 0.6}, params);
  const auto sat_high = evaluate_backend(space, size_cfg(1.0), {2.2, 0.9}, params);
  CHECK(sat_high.f_effective_ghz < sat_low.f_effective_ghz);
}

TEST_CASE("f_effective is nondecreasing in f_target") {
  const auto space = one_knob_space();
  const OracleParams params;
  double prev = 0.0;
  for (double ft = 0.4; ft <= 2.2; ft += 0.05) {
    const auto r = evaluate_backend(space, size_cfg(0.7), {ft, 0.6}, params);
    CHECK(r.f_effective_ghz >= prev - 1e-12);
    prev = r.f_effective_ghz;
  }
}

TEST_CASE("roi band is a contiguous interval when sweeping f_target") {
  const auto space = one_knob_space();
  const OracleParams params;
  for (double util : {0.5, 0.75, 0.88}) {
    std::vector<bool> in_band;
    for (double ft = 0.4; ft <= 2.2; ft += 0.01) {
      const auto r = evaluate_backend(space, size_cfg(0.6), {ft, util}, params);
      in_band.push_back(roi_label(ft, r.f_effective_ghz, 0.1));
    }
    int transitions = 0;
    for (std::size_t i = 1; i < in_band.size(); ++i)
      transitions += in_band[i] != in_band[i - 1];
    CHECK(transitions <= 2);
  }
}

TEST_CASE("system metrics worked example and identities") {
  const auto space = one_knob_space();
  const OracleParams params;  // workload_ops = 1e6
  BackendResult b;
  b.f_effective_ghz = 1.0;
  b.power_mw = 10.0;
  const SystemResult s = evaluate_system(b, space, size_cfg(1.0), params);  // pi = s = 2
  CHECK(s.runtime_ms == doctest::Approx(0.5));  // 1e6 ops / (2 ops per ns) = 5e5 ns
  CHECK(s.energy_mj == doctest::Approx(b.power_mw * s.runtime_ms * 1e-3));

  BackendResult b2 = b;
  b2.f_effective_ghz = 2.0;
  const SystemResult s2 = evaluate_system(b2, space, size_cfg(1.0), params);
  CHECK(s2.runtime_ms == doctest::Approx(s.runtime_ms / 2.0));
}

TEST_CASE("dataset generation is an arch-major cross product") {
  const auto space = one_knob_space();
  const OracleParams params;
  std::vector<Configuration> cfgs;
  for (int i = 0; i < 24; ++i) cfgs.push_back(size_cfg(i / 24.0));
  std::vector<BackendKnobs> knobs;
  for (int i = 0; i < 30; ++i) knobs.push_back({0.5 + i * 0.05, 0.6});
  const auto records = generate_dataset(space, cfgs, knobs, params, 0.1);
  REQUIRE(records.size() == 720);
  // arch-major: the first 30 records share the first configuration
  for (int i = 0; i < 30; ++i)
    CHECK(records[static_cast<std::size_t>(i)].cfg.num("size") == doctest::Approx(0.0));
  CHECK(records[30].cfg.num("size") == doctest::Approx(1.0 / 24.0));
  CHECK(generate_dataset(space, cfgs, {}, params, 0.1).empty());
}

TEST_CASE("dataset csv round-trips and is deterministic") {
  const auto space = one_knob_space();
  const OracleParams params;
  std::vector<Configuration> cfgs{size_cfg(0.2), size_cfg(0.8)};
  std::vector<BackendKnobs> knobs{{0.6, 0.5}, {1.8, 0.8}};
  const auto records = generate_dataset(space, cfgs, knobs, params, 0.1);
  const std::string csv = dataset_to_csv(space, records);
  CHECK(csv == dataset_to_csv(space, generate_dataset(space, cfgs, knobs, params, 0.1)));
  const auto back = dataset_from_csv(space, csv);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].backend.power_mw == doctest::Approx(records[i].backend.power_mw));
    CHECK(back[i].roi == records[i].roi);
  }
}

TEST_CASE("noise is deterministic and bounded") {
  const auto space = one_knob_space();
  OracleParams noisy;
  noisy.noise = 0.02;
  noisy.seed = 7;
  const auto a = evaluate_backend(space, size_cfg(0.5), {1.0, 0.6}, noisy);
  const auto b = evaluate_backend(space, size_cfg(0.5), {1.0, 0.6}, noisy);
  CHECK(a.power_mw == b.power_mw);
  const OracleParams clean;
  const auto c = evaluate_backend(space, size_cfg(0.5), {1.0, 0.6}, clean);
  CHECK(std::abs(a.power_mw - c.power_mw) / c.power_mw <= 0.02 + 1e-9);
}

TEST_CASE("oracle params json round-trip") {
  OracleParams p;
  p.a = 0.4;
  p.noise = 0.01;
  p.size_weights["size"] = 2.5;
  const OracleParams q = OracleParams::from_json_text(p.to_json_text());
  CHECK(q.a == doctest::Approx(0.4));
  CHECK(q.noise == doctest::Approx(0.01));
  CHECK(q.size_weights.at("size") == doctest::Approx(2.5));
}
