#pragma once

#include <functional>
#include <string>
#include <vector>

#include "acceldse/surrogate/tree.hpp"  // Matrix

namespace acceldse {

// Least-squares meta-learner over base-model predictions on the validation
// set. Falls back to ridge (lambda = 1e-6) when the normal equations are
// singular; the fallback is reported on the model.
class StackedEnsemble {
 public:
  using BasePredictor = std::function<double(const std::vector<double>&)>;

  // base(i) evaluates base model i. Weights are fit on (x_val, y_val).
  void fit(const std::vector<BasePredictor>& bases, const Matrix& x_val,
           const std::vector<double>& y_val);

  double predict(const std::vector<double>& x) const;

  const std::vector<double>& weights() const { return weights_; }  // last is intercept
  bool used_ridge_fallback() const { return ridge_fallback_; }
  std::size_t base_count() const { return bases_.size(); }

 private:
  std::vector<BasePredictor> bases_;
  std::vector<double> weights_;
  bool ridge_fallback_ = false;
};

// Ordinary least squares via Gaussian elimination on the normal equations.
// Returns false when the system is singular.
bool solve_least_squares(const Matrix& a, const std::vector<double>& b,
                         std::vector<double>* out, double ridge = 0.0);

}  // namespace acceldse
