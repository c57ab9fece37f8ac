#include "acceldse/dse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace acceldse {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

double normal_cdf(double z) { return 0.5 * (1.0 + std::erf(z / kSqrt2)); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / 2.5066282746310005024;  // sqrt(2*pi)
}

bool dominates(const Trial& a, const Trial& b) {
  return a.energy_mj <= b.energy_mj && a.area_um2 <= b.area_um2 &&
         (a.energy_mj < b.energy_mj || a.area_um2 < b.area_um2);
}

}  // namespace

ParzenDensity::ParzenDensity(const ParameterSpec& spec,
                             const std::vector<ParamValue>& observations)
    : spec_(spec) {
  if (observations.empty()) throw std::invalid_argument("parzen density: no observations");
  if (spec.kind == ParamKind::Cat) {
    std::vector<double> counts(spec.choices.size(), 0.0);
    for (const auto& v : observations) {
      const std::string& c = std::get<std::string>(v);
      const auto it = std::find(spec.choices.begin(), spec.choices.end(), c);
      if (it == spec.choices.end())
        throw std::invalid_argument("parzen density: unknown choice " + c);
      counts[static_cast<std::size_t>(it - spec.choices.begin())] += 1.0;
    }
    const double denom = static_cast<double>(observations.size() + spec.choices.size());
    cat_probs_.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) cat_probs_[i] = (counts[i] + 1.0) / denom;
    return;
  }
  const double range = spec.high - spec.low;
  const double n = static_cast<double>(observations.size());
  bandwidth_ = std::max(range * 1.06 * std::pow(n, -0.2), range * 0.01);
  for (const auto& v : observations) {
    const double c = std::get<double>(v);
    centers_.push_back(c);
    const double mass = normal_cdf((spec.high - c) / bandwidth_) -
                        normal_cdf((spec.low - c) / bandwidth_);
    trunc_mass_.push_back(std::max(mass, 1e-12));
  }
}

double ParzenDensity::pdf(const ParamValue& v) const {
  if (spec_.kind == ParamKind::Cat) {
    const std::string& c = std::get<std::string>(v);
    const auto it = std::find(spec_.choices.begin(), spec_.choices.end(), c);
    if (it == spec_.choices.end()) return 0.0;
    return cat_probs_[static_cast<std::size_t>(it - spec_.choices.begin())];
  }
  const double x = std::get<double>(v);
  if (x < spec_.low || x > spec_.high) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < centers_.size(); ++i)
    acc += normal_pdf((x - centers_[i]) / bandwidth_) / (bandwidth_ * trunc_mass_[i]);
  return acc / static_cast<double>(centers_.size());
}

ParamValue ParzenDensity::sample(Rng& rng) const {
  if (spec_.kind == ParamKind::Cat) {
    double u = rng.uniform();
    for (std::size_t i = 0; i < cat_probs_.size(); ++i) {
      u -= cat_probs_[i];
      if (u <= 0.0) return spec_.choices[i];
    }
    return spec_.choices.back();
  }
  const std::size_t k =
      static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(centers_.size()) - 1));
  double x = spec_.low;
  for (int attempt = 0; attempt < 100; ++attempt) {
    x = centers_[k] + bandwidth_ * rng.normal();
    if (x >= spec_.low && x <= spec_.high) break;
    x = std::clamp(x, spec_.low, spec_.high);
  }
  if (spec_.kind == ParamKind::Int) x = std::clamp(std::floor(x + 0.5), spec_.low, spec_.high);
  return x;
}

MotpeState::MotpeState(const ParameterSpace& space, std::uint64_t seed, int n_startup,
                       double gamma, int candidates_per_step)
    : n_startup_(n_startup),
      gamma_(gamma),
      candidates_per_step_(candidates_per_step),
      sobol_(space.dim()),
      rng_(seed) {
  if (gamma <= 0.0 || gamma >= 1.0) throw std::invalid_argument("motpe: gamma must be in (0,1)");
  if (n_startup < 1 || candidates_per_step < 1)
    throw std::invalid_argument("motpe: counts must be positive");
}

Configuration MotpeState::startup_point(const ParameterSpace& space) {
  return space.decode_unit(sobol_.next(1)[0]);
}

std::vector<Trial> pareto_front(const std::vector<Trial>& trials) {
  std::vector<Trial> front;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (!trials[i].feasible || !trials[i].has_objectives) continue;
    bool dominated = false;
    for (std::size_t j = 0; j < trials.size() && !dominated; ++j) {
      if (i == j || !trials[j].feasible || !trials[j].has_objectives) continue;
      if (dominates(trials[j], trials[i])) dominated = true;
      // Exact duplicates: keep only the first occurrence.
      if (j < i && trials[j].energy_mj == trials[i].energy_mj &&
          trials[j].area_um2 == trials[i].area_um2)
        dominated = true;
    }
    if (!dominated) front.push_back(trials[i]);
  }
  return front;
}

void split_good_bad(const std::vector<Trial>& trials, double gamma,
                    std::vector<std::size_t>& good, std::vector<std::size_t>& bad) {
  good.clear();
  bad.clear();
  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (trials[i].feasible && trials[i].has_objectives)
      feasible.push_back(i);
    else
      bad.push_back(i);
  }
  if (feasible.size() < 2)
    throw std::invalid_argument("split_good_bad: needs at least 2 feasible trials");

  const std::size_t target =
      static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(feasible.size())));

  // Nondominated sorting into successive fronts.
  std::vector<std::size_t> remaining = feasible;
  std::vector<std::vector<std::size_t>> fronts;
  while (!remaining.empty()) {
    std::vector<std::size_t> front, rest;
    for (std::size_t i : remaining) {
      bool dominated = false;
      for (std::size_t j : remaining)
        if (j != i && dominates(trials[j], trials[i])) { dominated = true; break; }
      (dominated ? rest : front).push_back(i);
    }
    fronts.push_back(std::move(front));
    remaining = std::move(rest);
  }

  std::vector<std::size_t> leftovers;
  for (const auto& front : fronts) {
    if (good.size() >= target) {
      leftovers.insert(leftovers.end(), front.begin(), front.end());
      continue;
    }
    if (good.size() + front.size() <= target) {
      good.insert(good.end(), front.begin(), front.end());
      continue;
    }
    // Partial front: fill by descending crowding distance.
    std::vector<double> crowd(front.size(), 0.0);
    for (int obj = 0; obj < 2; ++obj) {
      std::vector<std::size_t> order(front.size());
      for (std::size_t k = 0; k < front.size(); ++k) order[k] = k;
      auto value = [&](std::size_t k) {
        return obj == 0 ? trials[front[k]].energy_mj : trials[front[k]].area_um2;
      };
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
      const double span = value(order.back()) - value(order.front());
      crowd[order.front()] = std::numeric_limits<double>::infinity();
      crowd[order.back()] = std::numeric_limits<double>::infinity();
      if (span > 0.0)
        for (std::size_t k = 1; k + 1 < order.size(); ++k)
          crowd[order[k]] += (value(order[k + 1]) - value(order[k - 1])) / span;
    }
    std::vector<std::size_t> pick(front.size());
    for (std::size_t k = 0; k < front.size(); ++k) pick[k] = k;
    std::sort(pick.begin(), pick.end(), [&](std::size_t a, std::size_t b) {
      if (crowd[a] != crowd[b]) return crowd[a] > crowd[b];
      if (trials[front[a]].energy_mj != trials[front[b]].energy_mj)
        return trials[front[a]].energy_mj < trials[front[b]].energy_mj;
      return front[a] < front[b];
    });
    for (std::size_t k = 0; k < pick.size(); ++k) {
      if (good.size() < target)
        good.push_back(front[pick[k]]);
      else
        leftovers.push_back(front[pick[k]]);
    }
  }
  std::sort(leftovers.begin(), leftovers.end());
  std::vector<std::size_t> merged;
  std::merge(bad.begin(), bad.end(), leftovers.begin(), leftovers.end(),
             std::back_inserter(merged));
  bad = std::move(merged);
}

Configuration MotpeState::suggest(const ParameterSpace& space) {
  if (static_cast<int>(trials_.size()) < n_startup_) return startup_point(space);

  std::size_t n_feasible = 0;
  for (const Trial& t : trials_)
    if (t.feasible && t.has_objectives) ++n_feasible;
  if (n_feasible < 2) return startup_point(space);

  std::vector<std::size_t> good, bad;
  split_good_bad(trials_, gamma_, good, bad);

  std::vector<ParzenDensity> l, g;
  for (const ParameterSpec& spec : space.specs()) {
    std::vector<ParamValue> gv, bv;
    for (std::size_t i : good) gv.push_back(trials_[i].cfg.values.at(spec.name));
    for (std::size_t i : bad) bv.push_back(trials_[i].cfg.values.at(spec.name));
    l.emplace_back(spec, gv);
    if (!bad.empty()) g.emplace_back(spec, bv);
  }

  auto draw = [&]() {
    Configuration cfg;
    for (std::size_t d = 0; d < space.dim(); ++d)
      cfg.values[space.specs()[d].name] = l[d].sample(rng_);
    return cfg;
  };
  if (g.empty()) return draw();

  Configuration best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < candidates_per_step_; ++c) {
    Configuration cand = draw();
    double score = 0.0;
    for (std::size_t d = 0; d < space.dim(); ++d) {
      const ParamValue& v = cand.values.at(space.specs()[d].name);
      score += std::log(std::max(l[d].pdf(v), 1e-300)) -
               std::log(std::max(g[d].pdf(v), 1e-300));
    }
    if (score > best_score) {
      best_score = score;
      best = std::move(cand);
    }
  }
  return best;
}

void MotpeState::observe(const ParameterSpace& space, const Configuration& cfg,
                         const TwoStagePrediction& pred, const CostSpec& cost) {
  const auto violations = space.validate(cfg);
  if (!violations.empty())
    throw std::invalid_argument("motpe observe: invalid configuration: " + violations.front());
  Trial t;
  t.cfg = cfg;
  t.startup = static_cast<int>(trials_.size()) < n_startup_;
  if (!pred.discarded) {
    t.has_objectives = true;
    t.energy_mj = pred.energy_mj;
    t.area_um2 = pred.area_um2;
    t.power_mw = pred.power_mw;
    t.runtime_ms = pred.runtime_ms;
    t.f_effective_ghz = pred.f_effective_ghz;
    t.feasible = pred.power_mw < cost.p_max_mw && pred.runtime_ms < cost.r_max_ms;
  }
  trials_.push_back(std::move(t));
}

Trial select_best(const std::vector<Trial>& front, const CostSpec& cost) {
  if (front.empty()) throw std::runtime_error("select_best: no feasible configuration");
  const Trial* best = &front[0];
  for (const Trial& t : front) {
    const double c = cost.cost(t), bc = cost.cost(*best);
    if (c < bc || (c == bc && (t.energy_mj < best->energy_mj ||
                               (t.energy_mj == best->energy_mj && t.area_um2 < best->area_um2))))
      best = &t;
  }
  return *best;
}

double hypervolume_2d(const std::vector<std::pair<double, double>>& points, double ref_e,
                      double ref_a) {
  std::vector<std::pair<double, double>> inside;
  for (const auto& p : points)
    if (p.first < ref_e && p.second < ref_a) inside.push_back(p);
  if (inside.empty()) return 0.0;
  std::sort(inside.begin(), inside.end());
  // Horizontal slabs over the staircase of nondominated points: points are
  // swept by ascending energy, each with strictly lower area than all before.
  double hv = 0.0;
  double prev_a = ref_a;
  for (const auto& [e, a] : inside) {
    if (a >= prev_a) continue;  // dominated by an earlier point
    hv += (ref_e - e) * (prev_a - a);
    prev_a = a;
  }
  return hv;
}

DseReport run_dse(const ParameterSpace& space, const Predictor& predictor,
                  const CostSpec& cost, const DseSettings& settings) {
  if (settings.budget < settings.n_startup)
    throw std::invalid_argument("run_dse: budget must cover the startup phase");
  MotpeState state(space, settings.seed, settings.n_startup, settings.gamma,
                   settings.candidates_per_step);
  for (int i = 0; i < settings.budget; ++i) {
    const Configuration cfg = state.suggest(space);
    state.observe(space, cfg, predictor(cfg), cost);
  }

  DseReport report;
  report.trials = state.trials();
  report.pareto = pareto_front(report.trials);
  if (!report.pareto.empty()) {
    report.best = select_best(report.pareto, cost);
    report.has_best = true;
  }

  double max_e = 0.0, max_a = 0.0;
  bool any = false;
  for (const Trial& t : report.trials) {
    if (!t.feasible || !t.has_objectives) continue;
    max_e = std::max(max_e, t.energy_mj);
    max_a = std::max(max_a, t.area_um2);
    any = true;
  }
  report.ref_energy = any ? 1.1 * max_e : 0.0;
  report.ref_area = any ? 1.1 * max_a : 0.0;

  std::vector<std::pair<double, double>> pts;
  for (const Trial& t : report.trials) {
    if (t.feasible && t.has_objectives) pts.emplace_back(t.energy_mj, t.area_um2);
    report.hypervolume.push_back(
        any ? hypervolume_2d(pts, report.ref_energy, report.ref_area) : 0.0);
  }
  return report;
}

namespace {

nlohmann::json trial_to_json(const Trial& t) {
  nlohmann::json j;
  j["cfg"] = nlohmann::json::parse(configuration_to_json(t.cfg));
  j["feasible"] = t.feasible;
  j["startup"] = t.startup;
  if (t.has_objectives) {
    j["energy_mj"] = t.energy_mj;
    j["area_um2"] = t.area_um2;
    j["power_mw"] = t.power_mw;
    j["runtime_ms"] = t.runtime_ms;
    j["f_effective_ghz"] = t.f_effective_ghz;
  } else {
    j["discarded"] = true;
  }
  return j;
}

}  // namespace

std::string DseReport::to_json() const {
  nlohmann::json j;
  j["trials"] = nlohmann::json::array();
  for (const Trial& t : trials) j["trials"].push_back(trial_to_json(t));
  j["pareto"] = nlohmann::json::array();
  for (const Trial& t : pareto) j["pareto"].push_back(trial_to_json(t));
  if (has_best) j["best"] = trial_to_json(best);
  j["hypervolume"] = hypervolume;
  j["reference_point"] = {{"energy_mj", ref_energy}, {"area_um2", ref_area}};
  return j.dump(2);
}

std::string dse_report_svg(const DseReport& report) {
  const double w = 640, h = 480, m = 50;
  double min_e = 1e300, max_e = -1e300, min_a = 1e300, max_a = -1e300;
  for (const Trial& t : report.trials) {
    if (!t.has_objectives) continue;
    min_e = std::min(min_e, t.energy_mj);
    max_e = std::max(max_e, t.energy_mj);
    min_a = std::min(min_a, t.area_um2);
    max_a = std::max(max_a, t.area_um2);
  }
  if (min_e > max_e) { min_e = 0; max_e = 1; min_a = 0; max_a = 1; }
  if (max_e == min_e) max_e = min_e + 1;
  if (max_a == min_a) max_a = min_a + 1;
  auto sx = [&](double e) { return m + (e - min_e) / (max_e - min_e) * (w - 2 * m); };
  auto sy = [&](double a) { return h - m - (a - min_a) / (max_a - min_a) * (h - 2 * m); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << w - m << "\" y2=\"" << h - m
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << h - m
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << w / 2 << "\" y=\"" << h - 10
      << "\" text-anchor=\"middle\" font-size=\"12\">energy (mJ)</text>\n"
      << "<text x=\"14\" y=\"" << h / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
      << "transform=\"rotate(-90 14 " << h / 2 << ")\">area (um^2)</text>\n";
  for (const Trial& t : report.trials) {
    if (!t.has_objectives) continue;
    if (t.feasible)
      svg << "<circle cx=\"" << sx(t.energy_mj) << "\" cy=\"" << sy(t.area_um2)
          << "\" r=\"3\" fill=\"seagreen\"/>\n";
    else
      svg << "<circle cx=\"" << sx(t.energy_mj) << "\" cy=\"" << sy(t.area_um2)
          << "\" r=\"3\" fill=\"none\" stroke=\"crimson\"/>\n";
  }
  for (const Trial& t : report.pareto)
    svg << "<circle cx=\"" << sx(t.energy_mj) << "\" cy=\"" << sy(t.area_um2)
        << "\" r=\"5\" fill=\"none\" stroke=\"navy\" stroke-width=\"2\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace acceldse
