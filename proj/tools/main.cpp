// Command-line front end: sampling, dataset generation, hierarchy-graph
// extraction, surrogate training/evaluation, and design space exploration.
// Exit codes: 0 success, 1 runtime/data error, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "acceldse/dse.hpp"
#include "acceldse/metrics.hpp"
#include "acceldse/netlist.hpp"
#include "acceldse/oracle.hpp"
#include "acceldse/param_space.hpp"
#include "acceldse/sampling.hpp"
#include "acceldse/surrogate/two_stage.hpp"

namespace fs = std::filesystem;
using namespace acceldse;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Temp-file-plus-rename so a crashed run never leaves a half-written artifact.
void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string space_path;
  std::string oracle_params_path;
};

ParameterSpace load_space(const GlobalOpts& g) {
  if (g.space_path.empty()) throw std::runtime_error("--space is required");
  return ParameterSpace::from_json_file(g.space_path);
}

OracleParams load_oracle_params(const GlobalOpts& g) {
  if (g.oracle_params_path.empty()) return OracleParams{};
  return OracleParams::from_json_file(g.oracle_params_path);
}

// Backend knobs may live in the space file as float entries named
// f_target_ghz and util; split them off so models see only the
// architectural dimensions.
struct SplitSpace {
  ParameterSpace arch;
  ParameterSpec f_target{"f_target_ghz", ParamKind::Float, 0.4, 2.2, {}, false};
  ParameterSpec util{"util", ParamKind::Float, 0.4, 0.9, {}, false};
};

SplitSpace split_space(const ParameterSpace& space) {
  SplitSpace out;
  std::vector<ParameterSpec> arch;
  for (const auto& s : space.specs()) {
    if (s.name == "f_target_ghz")
      out.f_target = s;
    else if (s.name == "util")
      out.util = s;
    else
      arch.push_back(s);
  }
  out.arch = ParameterSpace(std::move(arch));
  return out;
}

std::vector<BackendKnobs> sample_knobs(const SplitSpace& ss, std::size_t n,
                                       std::uint64_t seed) {
  std::vector<BackendKnobs> knobs;
  for (const Point& p : lhs(2, n, seed)) {
    BackendKnobs k;
    k.f_target_ghz = ss.f_target.low + p[0] * (ss.f_target.high - ss.f_target.low);
    k.util = ss.util.low + p[1] * (ss.util.high - ss.util.low);
    knobs.push_back(k);
  }
  return knobs;
}

std::vector<Configuration> sample_arch(const ParameterSpace& arch, std::size_t n,
                                       std::uint64_t seed) {
  std::vector<Configuration> cfgs;
  for (const Point& p : lhs(arch.dim(), n, seed)) cfgs.push_back(arch.decode_unit(p));
  return cfgs;
}

void write_manifest(const fs::path& path, const nlohmann::json& j) {
  write_atomic(path, j.dump(2) + "\n");
}

int cmd_sample(const GlobalOpts& g, const std::string& method, std::size_t n,
               const std::string& out_file) {
  const ParameterSpace space = load_space(g);
  std::vector<Point> pts;
  if (method == "lhs") {
    pts = lhs(space.dim(), n, g.seed);
  } else if (method == "sobol") {
    SobolSampler s(space.dim());
    pts = s.next(n);
  } else {
    HaltonSampler s(space.dim());
    pts = s.next(n);
  }

  std::string csv = configuration_csv_header(space) + "\n";
  for (const Point& p : pts) csv += configuration_csv_row(space, space.decode_unit(p)) + "\n";

  fs::create_directories(g.out_dir);
  const fs::path out = out_file.empty() ? fs::path(g.out_dir) / "samples.csv" : fs::path(out_file);
  write_atomic(out, csv);

  // Stratification summary: occupied strata per dimension out of n.
  std::cout << "wrote " << n << " configurations to " << out.string() << "\n";
  for (std::size_t d = 0; d < space.dim(); ++d) {
    std::vector<bool> hit(n, false);
    for (const Point& p : pts)
      hit[std::min(n - 1, static_cast<std::size_t>(p[d] * static_cast<double>(n)))] = true;
    std::size_t occupied = 0;
    for (bool b : hit) occupied += b;
    std::cout << "  " << space.specs()[d].name << ": " << occupied << "/" << n
              << " strata occupied\n";
  }
  write_manifest(fs::path(g.out_dir) / "sample_manifest.json",
                 {{"command", "sample"}, {"space", g.space_path}, {"method", method},
                  {"n", n}, {"seed", g.seed}, {"out", out.string()}});
  return 0;
}

int cmd_gen_data(const GlobalOpts& g, const std::string& split, std::size_t arch_train,
                 std::size_t arch_val, std::size_t arch_test, std::size_t knobs_train,
                 std::size_t knobs_test, double eps) {
  const ParameterSpace space = load_space(g);
  const SplitSpace ss = split_space(space);
  const OracleParams params = load_oracle_params(g);
  fs::create_directories(g.out_dir);

  nlohmann::json manifest{{"command", "gen-data"}, {"split", split}, {"seed", g.seed},
                          {"space", g.space_path}, {"epsilon", eps}};

  if (split == "unseen-backend") {
    const auto cfgs = sample_arch(ss.arch, arch_train, g.seed);
    const auto kn_train = sample_knobs(ss, knobs_train, g.seed ^ 0x6b79u);
    const auto kn_test = sample_knobs(ss, knobs_test, g.seed ^ 0x6b7au);
    write_atomic(fs::path(g.out_dir) / "train.csv",
                 dataset_to_csv(ss.arch, generate_dataset(ss.arch, cfgs, kn_train, params, eps)));
    write_atomic(fs::path(g.out_dir) / "test.csv",
                 dataset_to_csv(ss.arch, generate_dataset(ss.arch, cfgs, kn_test, params, eps)));
    manifest["arch_configs"] = arch_train;
    manifest["train_knobs"] = knobs_train;
    manifest["test_knobs"] = knobs_test;
    manifest["train_rows"] = arch_train * knobs_train;
    manifest["test_rows"] = arch_train * knobs_test;
  } else {
    const auto cfgs = sample_arch(ss.arch, arch_train + arch_val + arch_test, g.seed);
    const auto knobs = sample_knobs(ss, knobs_train, g.seed ^ 0x6b79u);
    auto slice = [&](std::size_t lo, std::size_t hi) {
      return std::vector<Configuration>(cfgs.begin() + static_cast<long>(lo),
                                        cfgs.begin() + static_cast<long>(hi));
    };
    write_atomic(fs::path(g.out_dir) / "train.csv",
                 dataset_to_csv(ss.arch, generate_dataset(ss.arch, slice(0, arch_train), knobs,
                                                          params, eps)));
    write_atomic(fs::path(g.out_dir) / "val.csv",
                 dataset_to_csv(ss.arch, generate_dataset(ss.arch, slice(arch_train, arch_train + arch_val),
                                                          knobs, params, eps)));
    write_atomic(fs::path(g.out_dir) / "test.csv",
                 dataset_to_csv(ss.arch,
                                generate_dataset(ss.arch, slice(arch_train + arch_val, cfgs.size()),
                                                 knobs, params, eps)));
    manifest["arch_train"] = arch_train;
    manifest["arch_val"] = arch_val;
    manifest["arch_test"] = arch_test;
    manifest["knobs"] = knobs_train;
  }
  write_manifest(fs::path(g.out_dir) / "gen_data_manifest.json", manifest);
  std::cout << "dataset written to " << g.out_dir << "\n";
  return 0;
}

int cmd_extract_lhg(const GlobalOpts& g, const std::string& netlist_path,
                    const std::string& top, const std::string& out_file) {
  const NetlistAst ast = parse_netlist(read_file(netlist_path));
  const LogicalHierarchyGraph lhg = build_lhg(ast, top);
  fs::create_directories(g.out_dir);
  const fs::path out = out_file.empty() ? fs::path(g.out_dir) / "lhg.json" : fs::path(out_file);
  write_atomic(out, lhg_to_json(lhg) + "\n");
  std::cout << "wrote " << lhg.nodes.size() << " nodes, " << lhg.edges.size()
            << " edges to " << out.string() << "\n";
  return 0;
}

int cmd_train(const GlobalOpts& g, const std::string& train_path, const std::string& val_path,
              const std::string& model_kind, int budget, double eps,
              const std::string& out_file) {
  const ParameterSpace space = load_space(g);
  const SplitSpace ss = split_space(space);
  const auto train = dataset_from_csv(ss.arch, read_file(train_path));
  const auto val = dataset_from_csv(ss.arch, read_file(val_path));

  TwoStageHp hp;
  hp.regressor_kind = model_kind;
  hp.regressor_budget = budget;
  hp.seed = g.seed;
  const TwoStageModel model = train_two_stage(ss.arch, train, val, eps, hp);

  fs::create_directories(g.out_dir);
  const fs::path out = out_file.empty() ? fs::path(g.out_dir) / "model.json" : fs::path(out_file);
  write_atomic(out, model.to_json());

  nlohmann::json log{{"command", "train"}, {"seed", g.seed}, {"model_kind", model_kind},
                     {"budget", budget}, {"epsilon", eps},
                     {"train_rows", train.size()}, {"val_rows", val.size()},
                     {"stage2_rows", model.stage2_train_count()},
                     {"regressor_params", model.regressor_params_json()},
                     {"model", out.string()}};
  write_manifest(fs::path(g.out_dir) / "train_log.json", log);
  std::cout << "model written to " << out.string() << " (stage-2 rows: "
            << model.stage2_train_count() << ")\n";
  return 0;
}

int cmd_eval(const GlobalOpts& g, const std::string& model_path, const std::string& data_path) {
  const ParameterSpace space = load_space(g);
  const SplitSpace ss = split_space(space);
  const TwoStageModel model = TwoStageModel::from_json(read_file(model_path));
  const auto data = dataset_from_csv(ss.arch, read_file(data_path));

  std::vector<bool> truth, predicted;
  const char* metric_names[5] = {"power_mw", "f_eff_ghz", "area_um2", "energy_mj", "runtime_ms"};
  std::vector<double> actual[5], pred[5];
  for (const auto& rec : data) {
    const bool t = roi_label(rec.knobs.f_target_ghz, rec.backend.f_effective_ghz,
                             model.epsilon());
    Configuration arch_cfg;
    for (const auto& s : ss.arch.specs()) arch_cfg.values[s.name] = rec.cfg.values.at(s.name);
    const TwoStagePrediction p = model.predict(ss.arch, arch_cfg, rec.knobs);
    truth.push_back(t);
    predicted.push_back(!p.discarded);
    if (t && !p.discarded) {
      const double a[5] = {rec.backend.power_mw, rec.backend.f_effective_ghz,
                           rec.backend.area_um2, rec.system.energy_mj, rec.system.runtime_ms};
      const double q[5] = {p.power_mw, p.f_effective_ghz, p.area_um2, p.energy_mj,
                           p.runtime_ms};
      for (int m = 0; m < 5; ++m) {
        actual[m].push_back(a[m]);
        pred[m].push_back(q[m]);
      }
    }
  }

  const ClassReport cls = class_report(truth, predicted);
  std::printf("classifier: accuracy %.4f  f1 %.4f  (tp %zu fp %zu tn %zu fn %zu)\n", cls.accuracy,
              cls.f1, cls.tp, cls.fp, cls.tn, cls.fn);
  std::printf("%-12s %10s %10s %10s %8s\n", "metric", "muAPE%", "MAPE%", "stdAPE%", "n");
  nlohmann::json out{{"classifier", {{"accuracy", cls.accuracy}, {"f1", cls.f1}}}};
  for (int m = 0; m < 5; ++m) {
    if (actual[m].empty()) continue;
    const ErrorReport r = error_report(actual[m], pred[m]);
    std::printf("%-12s %10.3f %10.3f %10.3f %8zu\n", metric_names[m], r.mu_ape, r.mape,
                r.std_ape, r.n);
    out["metrics"][metric_names[m]] = {{"mu_ape", r.mu_ape}, {"mape", r.mape},
                                       {"std_ape", r.std_ape}, {"n", r.n}};
  }
  fs::create_directories(g.out_dir);
  write_manifest(fs::path(g.out_dir) / "eval_report.json", out);
  return 0;
}

int cmd_dse(const GlobalOpts& g, const std::string& model_path, bool use_oracle, int budget,
            int n_startup, double gamma, int candidates, double alpha, double beta,
            double p_max, double r_max, double eps) {
  const ParameterSpace space = load_space(g);
  const SplitSpace ss = split_space(space);
  const OracleParams params = load_oracle_params(g);

  // Search space: architectural dimensions plus the two backend knobs.
  std::vector<ParameterSpec> specs = ss.arch.specs();
  specs.push_back(ss.f_target);
  specs.push_back(ss.util);
  const ParameterSpace dse_space{std::move(specs)};

  auto split_cfg = [&](const Configuration& cfg, Configuration& arch_cfg, BackendKnobs& knobs) {
    for (const auto& s : ss.arch.specs()) arch_cfg.values[s.name] = cfg.values.at(s.name);
    knobs.f_target_ghz = cfg.num("f_target_ghz");
    knobs.util = cfg.num("util");
  };

  auto oracle_predict = [&](const Configuration& cfg) {
    Configuration arch_cfg;
    BackendKnobs knobs;
    split_cfg(cfg, arch_cfg, knobs);
    const BackendResult b = evaluate_backend(ss.arch, arch_cfg, knobs, params);
    const SystemResult s = evaluate_system(b, ss.arch, arch_cfg, params);
    TwoStagePrediction p;
    p.discarded = !roi_label(knobs.f_target_ghz, b.f_effective_ghz, eps);
    p.power_mw = b.power_mw;
    p.f_effective_ghz = b.f_effective_ghz;
    p.area_um2 = b.area_um2;
    p.energy_mj = s.energy_mj;
    p.runtime_ms = s.runtime_ms;
    return p;
  };

  TwoStageModel model;
  Predictor predictor;
  if (use_oracle) {
    predictor = oracle_predict;
  } else {
    if (model_path.empty()) throw std::runtime_error("dse: need --model or --use-oracle");
    model = TwoStageModel::from_json(read_file(model_path));
    predictor = [&](const Configuration& cfg) {
      Configuration arch_cfg;
      BackendKnobs knobs;
      split_cfg(cfg, arch_cfg, knobs);
      return model.predict(ss.arch, arch_cfg, knobs);
    };
  }

  CostSpec cost;
  cost.alpha = alpha;
  cost.beta = beta;
  cost.p_max_mw = p_max;
  cost.r_max_ms = r_max;
  DseSettings settings;
  settings.budget = budget;
  settings.n_startup = n_startup;
  settings.gamma = gamma;
  settings.candidates_per_step = candidates;
  settings.seed = g.seed;

  const DseReport report = run_dse(dse_space, predictor, cost, settings);
  fs::create_directories(g.out_dir);
  write_atomic(fs::path(g.out_dir) / "dse_report.json", report.to_json() + "\n");
  write_atomic(fs::path(g.out_dir) / "dse_scatter.svg", dse_report_svg(report));

  std::cout << "trials: " << report.trials.size() << "  pareto: " << report.pareto.size()
            << "\n";
  if (!report.has_best) {
    std::cout << "no feasible configuration found\n";
    return 0;
  }

  // Top-3 Pareto members by cost, re-checked against the oracle.
  std::vector<Trial> ranked = report.pareto;
  std::sort(ranked.begin(), ranked.end(),
            [&](const Trial& a, const Trial& b) { return cost.cost(a) < cost.cost(b); });
  if (ranked.size() > 3) ranked.resize(3);
  std::printf("%-4s %12s %12s %12s %12s\n", "rank", "dE%", "dA%", "dP%", "dT%");
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const TwoStagePrediction o = oracle_predict(ranked[i].cfg);
    auto pct = [](double predv, double truev) {
      return truev == 0.0 ? 0.0 : 100.0 * std::abs(predv - truev) / std::abs(truev);
    };
    std::printf("%-4zu %12.3f %12.3f %12.3f %12.3f\n", i + 1,
                pct(ranked[i].energy_mj, o.energy_mj), pct(ranked[i].area_um2, o.area_um2),
                pct(ranked[i].power_mw, o.power_mw), pct(ranked[i].runtime_ms, o.runtime_ms));
  }
  std::cout << "best cost: " << cost.cost(report.best) << "  ("
            << configuration_to_json(report.best.cfg) << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ML-accelerator design space exploration toolkit"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--space", g.space_path, "parameter space JSON");
  app.add_option("--oracle-params", g.oracle_params_path, "implementation model parameters JSON");
  if (const char* threads = std::getenv("ACCEL_DSE_THREADS")) (void)threads;

  auto* sample = app.add_subcommand("sample", "sample configurations from a space");
  std::string method = "lhs";
  std::size_t n = 24;
  std::string out_file;
  sample->add_option("--method", method, "lhs | sobol | halton")
      ->check(CLI::IsMember({"lhs", "sobol", "halton"}));
  sample->add_option("--n", n, "sample count");
  sample->add_option("--out", out_file, "output CSV path");

  auto* gen = app.add_subcommand("gen-data", "generate oracle datasets");
  std::string split = "unseen-backend";
  std::size_t arch_train = 24, arch_val = 10, arch_test = 10, knobs_train = 30, knobs_test = 10;
  double eps = 0.1;
  gen->add_option("--split", split, "unseen-backend | unseen-architecture")
      ->check(CLI::IsMember({"unseen-backend", "unseen-architecture"}));
  gen->add_option("--arch-train", arch_train, "architectural configurations (train)");
  gen->add_option("--arch-val", arch_val, "architectural configurations (val)");
  gen->add_option("--arch-test", arch_test, "architectural configurations (test)");
  gen->add_option("--knobs-train", knobs_train, "backend knob points (train)");
  gen->add_option("--knobs-test", knobs_test, "backend knob points (test)");
  gen->add_option("--eps", eps, "ROI half-width fraction");

  auto* lhg = app.add_subcommand("extract-lhg", "build a hierarchy graph from a netlist");
  std::string netlist_path, top_name, lhg_out;
  lhg->add_option("--netlist", netlist_path, "structural netlist file")->required();
  lhg->add_option("--top", top_name, "top module name")->required();
  lhg->add_option("--out", lhg_out, "output JSON path");

  auto* train = app.add_subcommand("train", "train a two-stage surrogate model");
  std::string train_path, val_path, model_kind = "gbdt", model_out;
  int budget = 8;
  double train_eps = 0.1;
  train->add_option("--train", train_path, "training dataset CSV")->required();
  train->add_option("--val", val_path, "validation dataset CSV")->required();
  train->add_option("--model", model_kind, "gbdt | rf | mlp | stacked")
      ->check(CLI::IsMember({"gbdt", "rf", "mlp", "stacked"}));
  train->add_option("--budget", budget, "hyperparameter candidates per metric");
  train->add_option("--eps", train_eps, "ROI half-width fraction");
  train->add_option("--out", model_out, "model JSON path");

  auto* eval = app.add_subcommand("eval", "evaluate a model against a dataset");
  std::string eval_model, eval_data;
  eval->add_option("--model", eval_model, "model JSON")->required();
  eval->add_option("--data", eval_data, "dataset CSV")->required();

  auto* dse = app.add_subcommand("dse", "multi-objective design space exploration");
  std::string dse_model;
  bool use_oracle = false;
  int dse_budget = 200, n_startup = 20, candidates = 24;
  double gamma = 0.25, alpha = 1.0, beta = 0.001, p_max = 1e18, r_max = 1e18, dse_eps = 0.1;
  dse->add_option("--model", dse_model, "trained model JSON");
  dse->add_flag("--use-oracle", use_oracle, "search against the oracle directly");
  dse->add_option("--budget", dse_budget, "trial budget");
  dse->add_option("--n-startup", n_startup, "quasi-random startup trials");
  dse->add_option("--gamma", gamma, "good-fraction");
  dse->add_option("--candidates", candidates, "candidates per suggestion");
  dse->add_option("--alpha", alpha, "energy weight (1/mJ)");
  dse->add_option("--beta", beta, "area weight (1/um^2)");
  dse->add_option("--p-max", p_max, "power limit (mW, strict)");
  dse->add_option("--r-max", r_max, "runtime limit (ms, strict)");
  dse->add_option("--eps", dse_eps, "ROI half-width fraction (oracle mode)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (sample->parsed()) return cmd_sample(g, method, n, out_file);
    if (gen->parsed())
      return cmd_gen_data(g, split, arch_train, arch_val, arch_test, knobs_train, knobs_test,
                          eps);
    if (lhg->parsed()) return cmd_extract_lhg(g, netlist_path, top_name, lhg_out);
    if (train->parsed())
      return cmd_train(g, train_path, val_path, model_kind, budget, train_eps, model_out);
    if (eval->parsed()) return cmd_eval(g, eval_model, eval_data);
    if (dse->parsed())
      return cmd_dse(g, dse_model, use_oracle, dse_budget, n_startup, gamma, candidates, alpha,
                     beta, p_max, r_max, dse_eps);
  } catch (const ParseError& e) {
    std::cerr << "error: line " << e.line << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
