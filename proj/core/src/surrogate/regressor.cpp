#include "acceldse/surrogate/regressor.hpp"

#include <stdexcept>

#include "json.hpp"

namespace acceldse {

namespace {

class GbdtWrapper final : public Regressor {
 public:
  explicit GbdtWrapper(GbdtRegressor m) : model_(std::move(m)) {}
  double predict(const std::vector<double>& x) const override { return model_.predict(x); }
  std::string kind() const override { return "gbdt"; }
  std::string to_json() const override {
    nlohmann::json j{{"kind", "gbdt"}, {"model", nlohmann::json::parse(model_.to_json())}};
    return j.dump();
  }

 private:
  GbdtRegressor model_;
};

class RfWrapper final : public Regressor {
 public:
  explicit RfWrapper(RandomForestRegressor m) : model_(std::move(m)) {}
  double predict(const std::vector<double>& x) const override { return model_.predict(x); }
  std::string kind() const override { return "rf"; }
  std::string to_json() const override {
    nlohmann::json j{{"kind", "rf"}, {"model", nlohmann::json::parse(model_.to_json())}};
    return j.dump();
  }

 private:
  RandomForestRegressor model_;
};

class MlpWrapper final : public Regressor {
 public:
  explicit MlpWrapper(MlpModel m) : model_(std::move(m)) {}
  double predict(const std::vector<double>& x) const override { return model_.predict(x); }
  std::string kind() const override { return "mlp"; }
  std::string to_json() const override {
    nlohmann::json j{{"kind", "mlp"}, {"model", nlohmann::json::parse(model_.to_json())}};
    return j.dump();
  }

 private:
  MlpModel model_;
};

class StackedWrapper final : public Regressor {
 public:
  StackedWrapper(std::vector<std::unique_ptr<Regressor>> bases,
                 std::vector<double> weights, bool ridge_fallback)
      : bases_(std::move(bases)),
        weights_(std::move(weights)),
        ridge_fallback_(ridge_fallback) {}

  double predict(const std::vector<double>& x) const override {
    double v = weights_.back();
    for (std::size_t i = 0; i < bases_.size(); ++i) v += weights_[i] * bases_[i]->predict(x);
    return v;
  }
  std::string kind() const override { return "stacked"; }
  std::string to_json() const override {
    nlohmann::json j;
    j["kind"] = "stacked";
    j["weights"] = weights_;
    j["ridge_fallback"] = ridge_fallback_;
    j["bases"] = nlohmann::json::array();
    for (const auto& b : bases_) j["bases"].push_back(nlohmann::json::parse(b->to_json()));
    return j.dump();
  }

 private:
  std::vector<std::unique_ptr<Regressor>> bases_;
  std::vector<double> weights_;
  bool ridge_fallback_;
};

}  // namespace

std::unique_ptr<Regressor> make_regressor(GbdtRegressor model) {
  return std::make_unique<GbdtWrapper>(std::move(model));
}
std::unique_ptr<Regressor> make_regressor(RandomForestRegressor model) {
  return std::make_unique<RfWrapper>(std::move(model));
}
std::unique_ptr<Regressor> make_regressor(MlpModel model) {
  return std::make_unique<MlpWrapper>(std::move(model));
}
std::unique_ptr<Regressor> make_stacked_regressor(
    std::vector<std::unique_ptr<Regressor>> bases, std::vector<double> weights,
    bool ridge_fallback) {
  return std::make_unique<StackedWrapper>(std::move(bases), std::move(weights),
                                          ridge_fallback);
}

std::unique_ptr<Regressor> regressor_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "gbdt") return make_regressor(GbdtRegressor::from_json(j.at("model").dump()));
  if (kind == "rf")
    return make_regressor(RandomForestRegressor::from_json(j.at("model").dump()));
  if (kind == "mlp") return make_regressor(MlpModel::from_json(j.at("model").dump()));
  if (kind == "stacked") {
    std::vector<std::unique_ptr<Regressor>> bases;
    for (const auto& b : j.at("bases")) bases.push_back(regressor_from_json(b.dump()));
    return make_stacked_regressor(std::move(bases),
                                  j.at("weights").get<std::vector<double>>(),
                                  j.at("ridge_fallback").get<bool>());
  }
  throw std::invalid_argument("unknown regressor kind '" + kind + "'");
}

}  // namespace acceldse
