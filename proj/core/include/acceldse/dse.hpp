#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "acceldse/param_space.hpp"
#include "acceldse/rng.hpp"
#include "acceldse/sampling.hpp"
#include "acceldse/surrogate/two_stage.hpp"

namespace acceldse {

struct Trial {
  Configuration cfg;
  bool feasible = false;
  bool has_objectives = false;  // false when the predictor discarded the point
  bool startup = false;
  double energy_mj = 0.0;
  double area_um2 = 0.0;
  double power_mw = 0.0;
  double runtime_ms = 0.0;
  double f_effective_ghz = 0.0;
};

struct CostSpec {
  double alpha = 1.0;    // energy weight, 1/mJ
  double beta = 0.001;   // area weight, 1/um^2
  double p_max_mw = 1e18;
  double r_max_ms = 1e18;

  double cost(const Trial& t) const { return alpha * t.energy_mj + beta * t.area_um2; }
};

// Per-dimension kernel density over one parameter. Numeric dimensions use a
// Gaussian mixture truncated and renormalized to [low, high] with bandwidth
// max(range * 1.06 * n^(-1/5), range * 0.01); categoricals use add-one
// smoothed frequencies.
class ParzenDensity {
 public:
  ParzenDensity(const ParameterSpec& spec, const std::vector<ParamValue>& observations);

  double pdf(const ParamValue& v) const;
  ParamValue sample(Rng& rng) const;

 private:
  ParameterSpec spec_;
  std::vector<double> centers_;    // numeric kernels
  std::vector<double> trunc_mass_; // per-kernel in-range probability mass
  double bandwidth_ = 0.0;
  std::vector<double> cat_probs_;  // categorical masses aligned with spec.choices
};

// Sequential model-based optimizer state: trial log plus the quasi-random
// startup stream and the candidate-scoring RNG.
class MotpeState {
 public:
  MotpeState(const ParameterSpace& space, std::uint64_t seed, int n_startup = 20,
             double gamma = 0.25, int candidates_per_step = 24);

  const std::vector<Trial>& trials() const { return trials_; }
  int n_startup() const { return n_startup_; }
  double gamma() const { return gamma_; }

  Configuration suggest(const ParameterSpace& space);
  void observe(const ParameterSpace& space, const Configuration& cfg,
               const TwoStagePrediction& pred, const CostSpec& cost);

 private:
  Configuration startup_point(const ParameterSpace& space);

  std::vector<Trial> trials_;
  int n_startup_;
  double gamma_;
  int candidates_per_step_;
  SobolSampler sobol_;
  Rng rng_;
};

// Nondominated feasible trials under minimization of (energy, area).
std::vector<Trial> pareto_front(const std::vector<Trial>& trials);

// Ranks feasible trials by nondomination level; the good side takes the first
// ceil(gamma * feasible_count) trials front-by-front, filling a partial front
// by descending crowding distance (ties: lower energy, then insertion order).
// Infeasible trials always land on the bad side. Returns trial indices.
void split_good_bad(const std::vector<Trial>& trials, double gamma,
                    std::vector<std::size_t>& good, std::vector<std::size_t>& bad);

// Argmin of alpha*E + beta*A over the front; ties by lower E then lower A.
// Throws when the front is empty.
Trial select_best(const std::vector<Trial>& front, const CostSpec& cost);

// Rectangle-sum hypervolume for 2D minimization against a reference point;
// points outside the reference box contribute nothing.
double hypervolume_2d(const std::vector<std::pair<double, double>>& points, double ref_e,
                      double ref_a);

using Predictor = std::function<TwoStagePrediction(const Configuration&)>;

struct DseSettings {
  int budget = 200;
  int n_startup = 20;
  double gamma = 0.25;
  int candidates_per_step = 24;
  std::uint64_t seed = 0;
};

struct DseReport {
  std::vector<Trial> trials;
  std::vector<Trial> pareto;
  bool has_best = false;
  Trial best;
  // Feasible-front hypervolume after each trial, against a reference point
  // fixed at 1.1x the per-objective maxima over the run's feasible trials.
  std::vector<double> hypervolume;
  double ref_energy = 0.0;
  double ref_area = 0.0;

  std::string to_json() const;
};

DseReport run_dse(const ParameterSpace& space, const Predictor& predictor,
                  const CostSpec& cost, const DseSettings& settings);

// Area-vs-energy scatter; infeasible trials drawn as hollow markers.
std::string dse_report_svg(const DseReport& report);

}  // namespace acceldse
