#include "acceldse/surrogate/two_stage.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace acceldse {

namespace {

constexpr const char* kMetricNames[] = {"power", "f_effective", "area", "energy", "runtime"};
constexpr int kNumMetrics = 5;

double metric_value(const DatasetRecord& rec, int metric) {
  switch (metric) {
    case 0: return rec.backend.power_mw;
    case 1: return rec.backend.f_effective_ghz;
    case 2: return rec.backend.area_um2;
    case 3: return rec.system.energy_mj;
    default: return rec.system.runtime_ms;
  }
}

std::uint64_t metric_seed(std::uint64_t seed, int metric) {
  return seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(metric + 1));
}

}  // namespace

bool roi_label(double f_target, double f_effective, double eps) {
  if (f_target <= 0.0) throw std::invalid_argument("roi_label: f_target must be positive");
  return std::abs(f_effective - f_target) <= eps * f_target;
}

std::vector<double> TwoStageModel::features(const ParameterSpace& space,
                                            const Configuration& cfg,
                                            const BackendKnobs& knobs) const {
  std::vector<double> x = space.encode(cfg);
  x.push_back(knobs.f_target_ghz);
  x.push_back(knobs.util);
  return x;
}

TwoStagePrediction TwoStageModel::predict(const ParameterSpace& space, const Configuration& cfg,
                                          const BackendKnobs& knobs) const {
  if (space.schema_hash() != space_hash_)
    throw std::invalid_argument("two-stage predict: parameter space does not match the model");
  const std::vector<double> x = features(space, cfg, knobs);
  TwoStagePrediction out;
  if (!classifier_.predict(x)) {
    out.discarded = true;
    return out;
  }
  out.power_mw = std::exp(regressors_[0]->predict(x));
  out.f_effective_ghz = std::exp(regressors_[1]->predict(x));
  out.area_um2 = std::exp(regressors_[2]->predict(x));
  out.energy_mj = std::exp(regressors_[3]->predict(x));
  out.runtime_ms = std::exp(regressors_[4]->predict(x));
  return out;
}

TwoStageModel train_two_stage(const ParameterSpace& space,
                              const std::vector<DatasetRecord>& train,
                              const std::vector<DatasetRecord>& val, double eps,
                              const TwoStageHp& hp) {
  if (train.empty() || val.empty())
    throw std::invalid_argument("train_two_stage: empty dataset");

  TwoStageModel model;
  model.eps_ = eps;
  model.space_hash_ = space.schema_hash();

  Matrix x_train, x_val;
  std::vector<bool> roi_train;
  x_train.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    x_train.push_back(model.features(space, train[i].cfg, train[i].knobs));
    const bool in = roi_label(train[i].knobs.f_target_ghz, train[i].backend.f_effective_ghz, eps);
    roi_train.push_back(in);
    if (in) model.stage2_indices_.push_back(i);
  }
  if (model.stage2_indices_.empty() || model.stage2_indices_.size() == train.size())
    throw std::runtime_error("train_two_stage: training set is single-class at this epsilon");

  TreeEnsembleHp cls_hp;
  cls_hp.n_estimators = hp.classifier_n_estimators;
  cls_hp.max_depth = hp.classifier_max_depth;
  cls_hp.learning_rate = hp.classifier_learning_rate;
  cls_hp.seed = hp.seed;
  model.classifier_.fit(x_train, roi_train, cls_hp);

  Matrix x_roi_val;
  std::vector<std::size_t> val_roi;
  for (std::size_t i = 0; i < val.size(); ++i) {
    if (roi_label(val[i].knobs.f_target_ghz, val[i].backend.f_effective_ghz, eps)) {
      val_roi.push_back(i);
      x_roi_val.push_back(model.features(space, val[i].cfg, val[i].knobs));
    }
  }
  if (val_roi.empty())
    throw std::runtime_error("train_two_stage: validation set has no in-ROI records");

  Matrix x_roi_train;
  for (std::size_t idx : model.stage2_indices_) x_roi_train.push_back(x_train[idx]);

  // Regressors fit the metrics in log space: every metric is strictly
  // positive and spans decades, and log targets make the squared-error
  // selection track relative rather than absolute accuracy.
  for (int m = 0; m < kNumMetrics; ++m) {
    std::vector<double> y_roi_train, y_roi_val;
    for (std::size_t idx : model.stage2_indices_)
      y_roi_train.push_back(std::log(metric_value(train[idx], m)));
    for (std::size_t idx : val_roi) y_roi_val.push_back(std::log(metric_value(val[idx], m)));

    HyperparamSearchSpec search;
    search.model_kind = hp.regressor_kind;
    search.budget = hp.regressor_budget;
    search.seed = metric_seed(hp.seed, m);
    SearchResult r = hyperparam_search(search, x_roi_train, y_roi_train, x_roi_val, y_roi_val);
    model.regressors_.push_back(std::move(r.best));
    model.regressor_params_.push_back(r.best_params_json);
  }
  return model;
}

std::string TwoStageModel::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["epsilon"] = eps_;
  j["space_hash"] = space_hash_;
  j["classifier"] = nlohmann::json::parse(classifier_.to_json());
  j["stage2_indices"] = stage2_indices_;
  for (int m = 0; m < kNumMetrics; ++m) {
    j["regressors"][kMetricNames[m]] = nlohmann::json::parse(regressors_[m]->to_json());
    j["regressor_params"][kMetricNames[m]] = regressor_params_[m];
  }
  return j.dump();
}

TwoStageModel TwoStageModel::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("version").get<int>() != 1)
    throw std::runtime_error("two-stage model: unsupported version");
  TwoStageModel model;
  model.eps_ = j.at("epsilon").get<double>();
  model.space_hash_ = j.at("space_hash").get<std::uint64_t>();
  model.classifier_ = GbdtClassifier::from_json(j.at("classifier").dump());
  model.stage2_indices_ = j.at("stage2_indices").get<std::vector<std::size_t>>();
  for (int m = 0; m < kNumMetrics; ++m) {
    model.regressors_.push_back(regressor_from_json(j.at("regressors").at(kMetricNames[m]).dump()));
    model.regressor_params_.push_back(j.at("regressor_params").at(kMetricNames[m]).get<std::string>());
  }
  return model;
}

}  // namespace acceldse
