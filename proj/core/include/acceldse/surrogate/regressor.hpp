#pragma once

#include <memory>
#include <string>
#include <vector>

#include "acceldse/surrogate/gcn.hpp"
#include "acceldse/surrogate/mlp.hpp"
#include "acceldse/surrogate/tree.hpp"

namespace acceldse {

// Type-erased scalar-feature regressor, so the two-stage model and the
// stacked ensemble can mix tree, forest and network learners.
class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual double predict(const std::vector<double>& x) const = 0;
  virtual std::string kind() const = 0;
  virtual std::string to_json() const = 0;
};

std::unique_ptr<Regressor> make_regressor(GbdtRegressor model);
std::unique_ptr<Regressor> make_regressor(RandomForestRegressor model);
std::unique_ptr<Regressor> make_regressor(MlpModel model);

// Meta-weights over base regressors (owned), last weight is the intercept.
std::unique_ptr<Regressor> make_stacked_regressor(
    std::vector<std::unique_ptr<Regressor>> bases, std::vector<double> weights,
    bool ridge_fallback);

std::unique_ptr<Regressor> regressor_from_json(const std::string& text);

}  // namespace acceldse
