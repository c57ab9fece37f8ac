#include <algorithm>
#include <cmath>
#include <set>

#include "acceldse/dse.hpp"
#include "acceldse/rng.hpp"
#include "doctest.h"

using namespace acceldse;

namespace {

Trial make_trial(double e, double a, bool feasible = true) {
  Trial t;
  t.feasible = feasible;
  t.has_objectives = true;
  t.energy_mj = e;
  t.area_um2 = a;
  return t;
}

bool dominates_ref(const Trial& a, const Trial& b) {
  return a.energy_mj <= b.energy_mj && a.area_um2 <= b.area_um2 &&
         (a.energy_mj < b.energy_mj || a.area_um2 < b.area_um2);
}

std::set<std::pair<double, double>> objective_set(const std::vector<Trial>& ts) {
  std::set<std::pair<double, double>> s;
  for (const auto& t : ts) s.emplace(t.energy_mj, t.area_um2);
  return s;
}

ParameterSpace square_space() {
  return ParameterSpace({
      ParameterSpec{"x", ParamKind::Float, 0.0, 1.0, {}, false},
      ParameterSpec{"y", ParamKind::Float, 0.0, 1.0, {}, false},
  });
}

// Toy bi-objective problem: both objectives small near the origin.
TwoStagePrediction toy_predict(const Configuration& cfg) {
  TwoStagePrediction p;
  const double x = cfg.num("x"), y = cfg.num("y");
  p.energy_mj = 0.5 + x + 0.3 * y;
  p.area_um2 = 0.5 + y + 0.3 * x;
  p.power_mw = 1.0;
  p.runtime_ms = 1.0;
  p.f_effective_ghz = 1.0;
  return p;
}

}  // namespace

TEST_CASE("pareto front worked examples") {
  const std::vector<Trial> trials{make_trial(1, 2), make_trial(2, 1), make_trial(2, 2)};
  CHECK(objective_set(pareto_front(trials)) ==
        std::set<std::pair<double, double>>{{1, 2}, {2, 1}});
  CHECK(pareto_front({make_trial(3, 4)}).size() == 1);
  CHECK(pareto_front({}).empty());
}

TEST_CASE("infeasible trials never reach the front") {
  const std::vector<Trial> trials{make_trial(0.1, 0.1, false), make_trial(5, 5, true)};
  const auto front = pareto_front(trials);
  REQUIRE(front.size() == 1);
  CHECK(front[0].energy_mj == doctest::Approx(5));
}

TEST_CASE("pareto front on random points satisfies the dominance definition") {
  Rng rng(71);
  std::vector<Trial> trials;
  for (int i = 0; i < 50; ++i)
    trials.push_back(make_trial(rng.uniform(), rng.uniform(), rng.uniform() < 0.8));
  const auto front = pareto_front(trials);
  // No member dominates another.
  for (const auto& a : front)
    for (const auto& b : front)
      if (&a != &b) CHECK_FALSE(dominates_ref(a, b));
  // Every excluded feasible trial is dominated by some member.
  const auto front_set = objective_set(front);
  for (const auto& t : trials) {
    if (!t.feasible || front_set.count({t.energy_mj, t.area_um2})) continue;
    bool dominated = false;
    for (const auto& m : front) dominated = dominated || dominates_ref(m, t);
    CHECK(dominated);
  }
}

TEST_CASE("good/bad split sizes and membership") {
  std::vector<std::size_t> good, bad;

  // Two mutually nondominating trials, gamma 0.5: one each.
  split_good_bad({make_trial(1, 2), make_trial(2, 1)}, 0.5, good, bad);
  CHECK(good.size() == 1);
  CHECK(bad.size() == 1);
  // Crowding ties break toward lower energy.
  CHECK(good[0] == 0);

  // Eight trials on one front, gamma 0.25: |G| = 2.
  std::vector<Trial> front8;
  for (int i = 0; i < 8; ++i) front8.push_back(make_trial(i, 7 - i));
  split_good_bad(front8, 0.25, good, bad);
  CHECK(good.size() == 2);
  CHECK(bad.size() == 6);

  // Dominated chain: domination order is the chain order.
  std::vector<Trial> chain{make_trial(1, 1), make_trial(2, 2), make_trial(3, 3),
                           make_trial(4, 4)};
  split_good_bad(chain, 0.5, good, bad);
  CHECK(good == std::vector<std::size_t>{0, 1});

  // Infeasible trials always land in B.
  std::vector<Trial> mixed{make_trial(1, 2), make_trial(2, 1),
                           make_trial(0.01, 0.01, false)};
  split_good_bad(mixed, 0.5, good, bad);
  CHECK(std::find(bad.begin(), bad.end(), 2u) != bad.end());
  CHECK(std::find(good.begin(), good.end(), 2u) == good.end());
  CHECK(good.size() + bad.size() == mixed.size());

  CHECK_THROWS(split_good_bad({make_trial(1, 1)}, 0.25, good, bad));
}

TEST_CASE("parzen density on numeric dimensions") {
  const ParameterSpec spec{"x", ParamKind::Float, 0.0, 1.0, {}, false};
  const ParzenDensity single(spec, {ParamValue{0.5}});
  CHECK(single.pdf(0.5 - 0.07) == doctest::Approx(single.pdf(0.5 + 0.07)));
  CHECK(single.pdf(1.5) == 0.0);

  // Quadrature: the truncated-renormalized mixture integrates to 1.
  const ParzenDensity mix(spec, {ParamValue{0.1}, ParamValue{0.9}, ParamValue{0.5}});
  const int steps = 20000;
  double integral = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double x = (i + 0.5) / steps;
    integral += mix.pdf(x) / steps;
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("parzen density on categoricals uses add-one smoothing") {
  const ParameterSpec spec{"c", ParamKind::Cat, 0, 0, {"a", "b"}, false};
  const ParzenDensity d(
      spec, {ParamValue{std::string("a")}, ParamValue{std::string("a")},
             ParamValue{std::string("a")}, ParamValue{std::string("b")}});
  CHECK(d.pdf(std::string("a")) == doctest::Approx(4.0 / 6.0));
  CHECK(d.pdf(std::string("b")) == doctest::Approx(2.0 / 6.0));
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const std::string s = std::get<std::string>(d.sample(rng));
    CHECK((s == "a" || s == "b"));
  }
}

TEST_CASE("parzen samples stay in the domain and ints are integral") {
  const ParameterSpec spec{"n", ParamKind::Int, 5, 60, {}, false};
  const ParzenDensity d(spec, {ParamValue{10.0}, ParamValue{55.0}});
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double v = std::get<double>(d.sample(rng));
    CHECK(v >= 5.0);
    CHECK(v <= 60.0);
    CHECK(v == doctest::Approx(std::round(v)));
  }
}

TEST_CASE("observe applies strict constraint comparisons") {
  const ParameterSpace space = square_space();
  CostSpec cost;
  cost.p_max_mw = 1.0;
  cost.r_max_ms = 100.0;
  MotpeState state(space, 1);
  const Configuration cfg = state.suggest(space);

  TwoStagePrediction at_limit = toy_predict(cfg);
  at_limit.power_mw = 1.0;  // P == Pmax -> infeasible
  state.observe(space, cfg, at_limit, cost);
  CHECK(state.trials().size() == 1);
  CHECK_FALSE(state.trials()[0].feasible);
  CHECK(state.trials()[0].has_objectives);
  CHECK(state.trials()[0].startup);

  TwoStagePrediction discarded;
  discarded.discarded = true;
  state.observe(space, state.suggest(space), discarded, cost);
  CHECK(state.trials().size() == 2);
  CHECK_FALSE(state.trials()[1].feasible);
  CHECK_FALSE(state.trials()[1].has_objectives);
}

TEST_CASE("select_best worked examples and invariances") {
  CostSpec cost;
  cost.alpha = 1.0;
  cost.beta = 0.001;
  const Trial a = make_trial(1, 1000), b = make_trial(2, 100);
  CHECK(select_best({a, b}, cost).energy_mj == doctest::Approx(1));  // 2.0 < 2.1
  CHECK(select_best({b, a}, cost).energy_mj == doctest::Approx(1));  // order-free

  CostSpec beta0;
  beta0.alpha = 1.0;
  beta0.beta = 0.0;
  CHECK(select_best({make_trial(3, 1), make_trial(2, 50)}, beta0).energy_mj ==
        doctest::Approx(2));

  CHECK_THROWS(select_best({}, cost));
}

TEST_CASE("2d hypervolume of a simple staircase") {
  // points (1,3),(2,2),(3,1) with ref (4,4): area = 3+2+... compute: slabs
  // (4-1)*(4-3) + (4-2)*(3-2) + (4-3)*(2-1) = 3 + 2 + 1 = 6.
  CHECK(hypervolume_2d({{1, 3}, {2, 2}, {3, 1}}, 4, 4) == doctest::Approx(6.0));
  // dominated point changes nothing
  CHECK(hypervolume_2d({{1, 3}, {2, 2}, {3, 1}, {3, 3}}, 4, 4) == doctest::Approx(6.0));
  CHECK(hypervolume_2d({{5, 5}}, 4, 4) == doctest::Approx(0.0));
}

TEST_CASE("run_dse on the toy problem") {
  const ParameterSpace space = square_space();
  CostSpec cost;
  DseSettings settings;
  settings.budget = 60;
  settings.n_startup = 20;
  settings.seed = 11;

  const DseReport report = run_dse(space, toy_predict, cost, settings);
  CHECK(report.trials.size() == 60);
  for (const Trial& t : report.pareto) CHECK(t.feasible);
  REQUIRE(report.has_best);

  // Hypervolume trace is nondecreasing.
  for (std::size_t i = 1; i < report.hypervolume.size(); ++i)
    CHECK(report.hypervolume[i] >= report.hypervolume[i - 1] - 1e-12);

  // budget == n_startup -> all startup trials.
  DseSettings startup_only = settings;
  startup_only.budget = settings.n_startup;
  const DseReport so = run_dse(space, toy_predict, cost, startup_only);
  for (const Trial& t : so.trials) CHECK(t.startup);

  // Determinism.
  const DseReport again = run_dse(space, toy_predict, cost, settings);
  CHECK(again.to_json() == report.to_json());

  CHECK_THROWS(run_dse(space, toy_predict, cost, DseSettings{10, 20, 0.25, 24, 1}));
}

TEST_CASE("suggestions concentrate in the good region") {
  const ParameterSpace space = square_space();
  CostSpec cost;
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    MotpeState state(space, seed);
    for (int i = 0; i < 50; ++i) {
      const Configuration cfg = state.suggest(space);
      state.observe(space, cfg, toy_predict(cfg), cost);
    }
    const Configuration s = state.suggest(space);
    // Optima sit at the origin; a guided suggestion should land in the
    // lower-left quadrant far more often than the 25% a uniform pick gives.
    if (s.num("x") < 0.5 && s.num("y") < 0.5) ++hits;
  }
  CHECK(hits >= 4);
}

TEST_CASE("dse report json and svg contain the expected sections") {
  const ParameterSpace space = square_space();
  DseSettings settings;
  settings.budget = 25;
  settings.seed = 2;
  const DseReport report = run_dse(space, toy_predict, CostSpec{}, settings);
  const std::string json = report.to_json();
  CHECK(json.find("\"trials\"") != std::string::npos);
  CHECK(json.find("\"pareto\"") != std::string::npos);
  CHECK(json.find("\"best\"") != std::string::npos);
  CHECK(json.find("\"hypervolume\"") != std::string::npos);
  const std::string svg = dse_report_svg(report);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("circle") != std::string::npos);
}
