#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "acceldse/oracle.hpp"
#include "acceldse/param_space.hpp"
#include "acceldse/surrogate/hyperparam.hpp"
#include "acceldse/surrogate/tree.hpp"

namespace acceldse {

// In-ROI test: |f_effective - f_target| <= eps * f_target (inclusive).
bool roi_label(double f_target, double f_effective, double eps);

struct TwoStageHp {
  std::string regressor_kind = "gbdt";  // passed through to hyperparam_search
  int regressor_budget = 8;
  std::uint64_t seed = 0;
  // ROI gate classifier settings.
  int classifier_n_estimators = 200;
  int classifier_max_depth = 4;
  double classifier_learning_rate = 0.1;
};

struct TwoStagePrediction {
  bool discarded = false;
  double power_mw = 0.0;
  double f_effective_ghz = 0.0;
  double area_um2 = 0.0;
  double energy_mj = 0.0;
  double runtime_ms = 0.0;
};

// ROI gate (boosted logistic classifier over all records) followed by one
// regressor per metric (P, f, A, E, T), each tuned by hyperparam_search and
// trained only on in-ROI records. Predictions outside the gate carry the
// discarded marker and no metric values.
class TwoStageModel {
 public:
  TwoStageModel() = default;

  TwoStagePrediction predict(const ParameterSpace& space, const Configuration& cfg,
                             const BackendKnobs& knobs) const;

  double epsilon() const { return eps_; }
  std::uint64_t space_hash() const { return space_hash_; }
  std::size_t stage2_train_count() const { return stage2_indices_.size(); }
  // Indices into the training dataset used by the stage-2 regressors.
  const std::vector<std::size_t>& stage2_indices() const { return stage2_indices_; }
  const GbdtClassifier& classifier() const { return classifier_; }
  const std::vector<std::string>& regressor_params_json() const { return regressor_params_; }

  std::string to_json() const;
  static TwoStageModel from_json(const std::string& text);

  friend TwoStageModel train_two_stage(const ParameterSpace& space,
                                       const std::vector<DatasetRecord>& train,
                                       const std::vector<DatasetRecord>& val, double eps,
                                       const TwoStageHp& hp);

 private:
  std::vector<double> features(const ParameterSpace& space, const Configuration& cfg,
                               const BackendKnobs& knobs) const;

  double eps_ = 0.1;
  std::uint64_t space_hash_ = 0;
  GbdtClassifier classifier_;
  // Order: power, f_effective, area, energy, runtime.
  std::vector<std::unique_ptr<Regressor>> regressors_;
  std::vector<std::string> regressor_params_;
  std::vector<std::size_t> stage2_indices_;
};

// Labels records at eps, fits the gate on every training record and the
// metric regressors on the ROI subset; the validation set drives model
// selection inside hyperparam_search. Throws if either split is single-class.
TwoStageModel train_two_stage(const ParameterSpace& space,
                              const std::vector<DatasetRecord>& train,
                              const std::vector<DatasetRecord>& val, double eps,
                              const TwoStageHp& hp);

}  // namespace acceldse
