#include "acceldse/oracle.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "acceldse/rng.hpp"
#include "acceldse/surrogate/two_stage.hpp"
#include "json.hpp"

namespace acceldse {

OracleParams OracleParams::from_json_text(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  OracleParams p;
  if (doc.contains("size_weights"))
    p.size_weights = doc["size_weights"].get<std::map<std::string, double>>();
  if (doc.contains("choice_weights"))
    p.choice_weights =
        doc["choice_weights"].get<std::map<std::string, std::map<std::string, double>>>();
  p.area_unit_um2 = doc.value("area_unit_um2", p.area_unit_um2);
  p.t0_ns = doc.value("t0_ns", p.t0_ns);
  p.a = doc.value("a", p.a);
  p.b = doc.value("b", p.b);
  p.u0 = doc.value("u0", p.u0);
  p.margin_ns = doc.value("margin_ns", p.margin_ns);
  p.p_leak_mw = doc.value("p_leak_mw", p.p_leak_mw);
  p.p_dyn_mw_ns = doc.value("p_dyn_mw_ns", p.p_dyn_mw_ns);
  p.workload_ops = doc.value("workload_ops", p.workload_ops);
  p.noise = doc.value("noise", p.noise);
  p.seed = doc.value("seed", p.seed);
  return p;
}

OracleParams OracleParams::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open oracle params file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string OracleParams::to_json_text() const {
  nlohmann::json doc;
  doc["size_weights"] = size_weights;
  doc["choice_weights"] = choice_weights;
  doc["area_unit_um2"] = area_unit_um2;
  doc["t0_ns"] = t0_ns;
  doc["a"] = a;
  doc["b"] = b;
  doc["u0"] = u0;
  doc["margin_ns"] = margin_ns;
  doc["p_leak_mw"] = p_leak_mw;
  doc["p_dyn_mw_ns"] = p_dyn_mw_ns;
  doc["workload_ops"] = workload_ops;
  doc["noise"] = noise;
  doc["seed"] = seed;
  return doc.dump(2);
}

double effective_size(const ParameterSpace& space, const Configuration& cfg,
                      const OracleParams& params) {
  double s = 1.0;
  for (const auto& spec : space.specs()) {
    if (spec.kind == ParamKind::Cat) {
      auto wit = params.choice_weights.find(spec.name);
      if (wit != params.choice_weights.end()) {
        auto cit = wit->second.find(cfg.cat(spec.name));
        if (cit != wit->second.end()) s += cit->second;
      }
    } else {
      double v = cfg.num(spec.name), lo = spec.low, hi = spec.high;
      if (spec.log_scale) {
        v = std::log(v);
        lo = std::log(spec.low);
        hi = std::log(spec.high);
      }
      const double x = (v - lo) / (hi - lo);
      auto wit = params.size_weights.find(spec.name);
      const double w = wit != params.size_weights.end() ? wit->second : 1.0;
      s += w * x;
    }
  }
  return s;
}

namespace {

// Deterministic multiplier in [1 - eta, 1 + eta] hashed from the inputs.
double noise_factor(const Configuration& cfg, const BackendKnobs& knobs,
                    const OracleParams& params) {
  if (params.noise <= 0.0) return 1.0;
  std::uint64_t h = fnv1a_str(configuration_to_json(cfg));
  h = fnv1a(&knobs.f_target_ghz, sizeof(double), h);
  h = fnv1a(&knobs.util, sizeof(double), h);
  h = fnv1a(&params.seed, sizeof(params.seed), h);
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0,1)
  return 1.0 + params.noise * (2.0 * u - 1.0);
}

}  // namespace

BackendResult evaluate_backend(const ParameterSpace& space, const Configuration& cfg,
                               const BackendKnobs& knobs, const OracleParams& params) {
  const double s = effective_size(space, cfg, params);
  const double cliff = std::max(0.0, knobs.util - params.u0);
  const double t_min = params.t0_ns * (1.0 + params.a * std::log(s)) *
                       (1.0 + params.b * cliff * cliff);
  const double t_target = 1.0 / knobs.f_target_ghz;
  const double t_eff = std::max(t_min, t_target - params.margin_ns);

  BackendResult r;
  r.f_effective_ghz = 1.0 / t_eff;
  r.worst_slack_ns = t_target - t_eff;
  r.area_um2 = params.area_unit_um2 * s / knobs.util;
  r.power_mw = params.p_leak_mw * s + params.p_dyn_mw_ns * s * r.f_effective_ghz;

  const double h = noise_factor(cfg, knobs, params);
  r.f_effective_ghz *= h;
  r.area_um2 *= h;
  r.power_mw *= h;
  return r;
}

SystemResult evaluate_system(const BackendResult& backend, const ParameterSpace& space,
                             const Configuration& cfg, const OracleParams& params) {
  const double parallelism = effective_size(space, cfg, params);
  SystemResult r;
  // ops / (GHz * parallelism) = ns; 1e-6 converts ns to ms
  r.runtime_ms =
      params.workload_ops / (backend.f_effective_ghz * parallelism) * 1e-6;
  // mW * ms = uJ; 1e-3 converts to mJ
  r.energy_mj = backend.power_mw * r.runtime_ms * 1e-3;
  return r;
}

std::vector<DatasetRecord> generate_dataset(const ParameterSpace& space,
                                            const std::vector<Configuration>& arch_cfgs,
                                            const std::vector<BackendKnobs>& knobs,
                                            const OracleParams& params, double eps) {
  std::vector<DatasetRecord> records;
  records.reserve(arch_cfgs.size() * knobs.size());
  for (const auto& cfg : arch_cfgs) {
    for (const auto& k : knobs) {
      DatasetRecord rec;
      rec.cfg = cfg;
      rec.knobs = k;
      rec.backend = evaluate_backend(space, cfg, k, params);
      rec.system = evaluate_system(rec.backend, space, cfg, params);
      rec.roi = roi_label(k.f_target_ghz, rec.backend.f_effective_ghz, eps);
      records.push_back(std::move(rec));
    }
  }
  return records;
}

std::string dataset_csv_header(const ParameterSpace& space) {
  std::string out = "design";
  for (const auto& s : space.specs()) out += "," + s.name;
  out += ",f_target_ghz,util,power_mw,f_eff_ghz,area_um2,energy_mj,runtime_ms,roi";
  return out;
}

std::string dataset_csv_row(const ParameterSpace& space, const DatasetRecord& rec,
                            std::size_t design_index) {
  std::ostringstream os;
  os.precision(12);
  os << design_index;
  for (const auto& s : space.specs()) {
    os << ",";
    if (s.kind == ParamKind::Cat) os << rec.cfg.cat(s.name);
    else os << rec.cfg.num(s.name);
  }
  os << "," << rec.knobs.f_target_ghz << "," << rec.knobs.util << ","
     << rec.backend.power_mw << "," << rec.backend.f_effective_ghz << ","
     << rec.backend.area_um2 << "," << rec.system.energy_mj << ","
     << rec.system.runtime_ms << "," << (rec.roi ? 1 : 0);
  return os.str();
}

std::string dataset_to_csv(const ParameterSpace& space,
                           const std::vector<DatasetRecord>& records) {
  std::string out = dataset_csv_header(space) + "\n";
  // Records are arch-major: the design index increments when the configuration
  // changes from the previous record.
  std::size_t design = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i > 0 && configuration_to_json(records[i].cfg) !=
                     configuration_to_json(records[i - 1].cfg))
      ++design;
    out += dataset_csv_row(space, records[i], design) + "\n";
  }
  return out;
}

std::vector<DatasetRecord> dataset_from_csv(const ParameterSpace& space,
                                            const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset csv: empty file");
  if (line != dataset_csv_header(space))
    throw std::runtime_error("dataset csv: header does not match the parameter space");

  std::vector<DatasetRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != space.dim() + 9)
      throw std::runtime_error("dataset csv: wrong column count on line " +
                               std::to_string(line_no));
    DatasetRecord rec;
    std::size_t c = 1;  // skip the design index
    for (const auto& s : space.specs()) {
      if (s.kind == ParamKind::Cat)
        rec.cfg.values[s.name] = cells[c++];
      else
        rec.cfg.values[s.name] = std::stod(cells[c++]);
    }
    rec.knobs.f_target_ghz = std::stod(cells[c++]);
    rec.knobs.util = std::stod(cells[c++]);
    rec.backend.power_mw = std::stod(cells[c++]);
    rec.backend.f_effective_ghz = std::stod(cells[c++]);
    rec.backend.area_um2 = std::stod(cells[c++]);
    rec.system.energy_mj = std::stod(cells[c++]);
    rec.system.runtime_ms = std::stod(cells[c++]);
    rec.roi = cells[c] == "1";
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace acceldse
